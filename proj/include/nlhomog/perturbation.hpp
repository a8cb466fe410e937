#ifndef NLHOMOG_PERTURBATION_HPP
#define NLHOMOG_PERTURBATION_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "nlhomog/kernels.hpp"

namespace nlhomog {

// Smooth monotone cutoff: 1 on [0, 1/4], 0 on [1/2, inf), exp-based
// partition-of-unity transition in between.
double cutoff_omega(double s);

// Antisymmetric vector perturbation c(z) = (c^1, ..., c^d), c^i(-z) = -c^i(z),
// applied to a symmetric base kernel as a_sym + ell . c.
class PerturbationSpec {
public:
    // c^i(z) = z_i a_sym(z) omega(|ell| |z|). Spot-checks symmetry of a_sym
    // on random +/-z pairs before accepting it.
    static PerturbationSpec cutoff_family(const KernelSpec& a_sym, const Point& ell,
                                          std::uint64_t check_seed = 0x5eedu);
    // Generic odd test perturbation c^i(z) = scale * z_i * exp(-|z|^2/(2 sigma^2)).
    static PerturbationSpec odd_gaussian(int dim, double sigma, double scale,
                                         const Point& ell);

    int dim() const { return dim_; }
    const Point& ell() const { return ell_; }
    bool is_cutoff_family() const { return is_cutoff_family_; }
    const std::vector<ScalarKernel>& components() const { return components_; }

    // ell . c(z)
    double combined(const Point& z) const;
    double decay_radius() const;

private:
    PerturbationSpec() = default;
    int dim_ = 1;
    Point ell_{};
    bool is_cutoff_family_ = false;
    std::vector<ScalarKernel> components_;
};

// Convenience matching the factory naming used by the pipeline configs.
PerturbationSpec make_cutoff_perturbation(const KernelSpec& a_sym, const Point& ell,
                                          std::uint64_t check_seed = 0x5eedu);

}  // namespace nlhomog

#endif
