#ifndef NLHOMOG_KERNELS_HPP
#define NLHOMOG_KERNELS_HPP

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nlhomog/grid.hpp"

namespace nlhomog {

class PerturbationSpec;

enum class KernelFamily {
    gaussian,
    shifted_gaussian,
    anisotropic_gaussian,
    compact_bump,
    composite_biased,
};

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& name);

// Small dense d x d matrix; entries beyond the active dimension stay zero.
using DMat = std::array<std::array<double, kMaxDim>, kMaxDim>;

struct Moments {
    double mass = 0.0;   // integral of a
    Point first{};       // integral of z a(z)
    DMat second{};       // integral of z_i z_j a(z)
};

// A compiled scalar function on R^d together with the radius beyond which
// its mass and second moment are below 1e-14. Everything downstream
// (periodization, moment quadrature, the rescaled generator) truncates at
// this radius.
struct ScalarKernel {
    int dim = 1;
    double decay_radius = 1.0;
    std::function<double(const Point&)> eval;

    double operator()(const Point& z) const { return eval(z); }
};

// Analytic description of a jump density a(z) >= 0 with finite mass and
// finite second moment. Immutable after construction; safe to share across
// threads.
class KernelSpec {
public:
    static KernelSpec gaussian(int dim, double sigma);
    static KernelSpec shifted_gaussian(int dim, double sigma, Point shift);
    // Centered Gaussian with full covariance (d = 2) or variance (d = 1).
    static KernelSpec anisotropic_gaussian(int dim, DMat covariance);
    // exp(-1/(1-(|z|/radius)^2)) inside |z| < radius, normalized to unit mass.
    static KernelSpec compact_bump(int dim, double radius);
    // a_sym(z) + ell . c(z); nonnegativity checked by seeded sampling.
    static KernelSpec composite_biased(KernelSpec base,
                                       std::shared_ptr<const PerturbationSpec> pert,
                                       std::uint64_t sample_seed = 0x5eedu);

    KernelFamily family() const { return family_; }
    int dim() const { return dim_; }
    double decay_radius() const { return decay_radius_; }
    const std::vector<double>& params() const { return params_; }
    const KernelSpec* base() const { return base_.get(); }
    const PerturbationSpec* perturbation() const { return pert_.get(); }

private:
    KernelSpec() = default;
    KernelFamily family_ = KernelFamily::gaussian;
    int dim_ = 1;
    std::vector<double> params_;
    double decay_radius_ = 0.0;
    std::shared_ptr<const KernelSpec> base_;
    std::shared_ptr<const PerturbationSpec> pert_;
};

// Pointwise density value; exact analytic formula per family.
double eval_kernel(const KernelSpec& spec, const Point& z);

// Compiled evaluator for the hot loops.
ScalarKernel evaluator(const KernelSpec& spec);

// Mass, first moment and raw second moment matrix. Closed forms where the
// family has them, adaptive midpoint quadrature (absolute tolerance tol)
// otherwise.
Moments kernel_moments(const KernelSpec& spec, double tol = 1e-12);

// Adaptive midpoint rule for integral of (prod_i z_i^{alpha_i}) k(z) over the
// decay box, doubling resolution until the update is below tol.
double moment_quadrature(const ScalarKernel& k, const std::array<int, kMaxDim>& alpha,
                         double tol);

}  // namespace nlhomog

#endif
