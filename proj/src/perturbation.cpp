#include "nlhomog/perturbation.hpp"

#include <cmath>
#include <random>

#include "nlhomog/errors.hpp"

namespace nlhomog {

double cutoff_omega(double s) {
    if (s <= 0.25) return 1.0;
    if (s >= 0.5) return 0.0;
    // g(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}), t = 2 - 4s in (0,1)
    double t = 2.0 - 4.0 * s;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

PerturbationSpec PerturbationSpec::cutoff_family(const KernelSpec& a_sym, const Point& ell,
                                                 std::uint64_t check_seed) {
    const int d = a_sym.dim();
    ScalarKernel base = evaluator(a_sym);

    // the construction is only meaningful for an even base kernel
    std::mt19937_64 rng(check_seed);
    std::uniform_real_distribution<double> u(-a_sym.decay_radius(), a_sym.decay_radius());
    for (int k = 0; k < 64; ++k) {
        Point z{};
        for (int i = 0; i < d; ++i) z[i] = u(rng);
        Point neg{};
        for (int i = 0; i < d; ++i) neg[i] = -z[i];
        double va = base(z), vb = base(neg);
        if (std::abs(va - vb) > 1e-12 * (1.0 + std::abs(va)))
            throw InputError("cutoff_family: base kernel is not symmetric");
    }

    double ell_norm = 0.0;
    for (int i = 0; i < d; ++i) ell_norm += ell[i] * ell[i];
    ell_norm = std::sqrt(ell_norm);

    PerturbationSpec p;
    p.dim_ = d;
    p.ell_ = ell;
    p.is_cutoff_family_ = true;
    for (int i = 0; i < d; ++i) {
        p.components_.push_back(ScalarKernel{
            d, a_sym.decay_radius(), [base, i, ell_norm, d](const Point& z) {
                double r = 0.0;
                for (int k = 0; k < d; ++k) r += z[k] * z[k];
                return z[i] * base(z) * cutoff_omega(ell_norm * std::sqrt(r));
            }});
    }
    return p;
}

PerturbationSpec PerturbationSpec::odd_gaussian(int dim, double sigma, double scale,
                                                const Point& ell) {
    if (!(sigma > 0.0)) throw ConfigError("odd_gaussian perturbation: sigma must be positive");
    PerturbationSpec p;
    p.dim_ = dim;
    p.ell_ = ell;
    p.is_cutoff_family_ = false;
    for (int i = 0; i < dim; ++i) {
        p.components_.push_back(ScalarKernel{
            dim, 8.0 * sigma, [sigma, scale, i, dim](const Point& z) {
                double r = 0.0;
                for (int k = 0; k < dim; ++k) r += z[k] * z[k];
                return scale * z[i] * std::exp(-r / (2.0 * sigma * sigma));
            }});
    }
    return p;
}

double PerturbationSpec::combined(const Point& z) const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
        if (ell_[i] != 0.0) s += ell_[i] * components_[i](z);
    return s;
}

double PerturbationSpec::decay_radius() const {
    double r = 0.0;
    for (const auto& c : components_) r = std::max(r, c.decay_radius);
    return r;
}

PerturbationSpec make_cutoff_perturbation(const KernelSpec& a_sym, const Point& ell,
                                          std::uint64_t check_seed) {
    return PerturbationSpec::cutoff_family(a_sym, ell, check_seed);
}

}  // namespace nlhomog
