#ifndef NLHOMOG_OPERATORS_HPP
#define NLHOMOG_OPERATORS_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "nlhomog/coefficients.hpp"
#include "nlhomog/grid.hpp"
#include "nlhomog/periodization.hpp"

namespace nlhomog {

enum class OperatorStorage { auto_select, dense, matrix_free };

struct AssembleOptions {
    OperatorStorage storage = OperatorStorage::auto_select;
    std::int64_t dense_node_cap = 4096;
    int threads = 1;
};

// Discrete realization of the kernel part K phi = integral of
// a_hat(xi - eta) mu(xi, eta) phi(eta), its adjoint, and the multiplier
// G = K 1. On separable coefficients the matrix-free form applies K through
// circular convolutions.
class DiscreteOperatorPair {
public:
    const TorusGrid& grid() const { return grid_; }
    const Field& G_diag() const { return g_diag_; }
    bool is_dense() const { return dense_.has_value(); }
    const Eigen::MatrixXd* dense_matrix() const { return dense_ ? &*dense_ : nullptr; }

    Field apply(const Field& phi) const;           // K phi
    Field apply_adjoint(const Field& psi) const;   // K* psi
    Field apply_A(const Field& phi) const;         // (K - G) phi

private:
    friend DiscreteOperatorPair assemble_operators(const PeriodizedKernel&,
                                                   const CoefficientSpec&, const TorusGrid&,
                                                   const AssembleOptions&);
    explicit DiscreteOperatorPair(TorusGrid g) : grid_(g) {}

    TorusGrid grid_;
    std::optional<Eigen::MatrixXd> dense_;  // M(j, m) = h^d a_hat(xi_j - xi_m) mu(xi_j, xi_m)
    // matrix-free separable path: mu(x, y) = lambda(x) nu(y)
    Field a_hat_;    // difference-grid kernel values
    Field lambda_, nu_;
    Field g_diag_;
};

DiscreteOperatorPair assemble_operators(const PeriodizedKernel& a_hat,
                                        const CoefficientSpec& mu, const TorusGrid& grid,
                                        const AssembleOptions& opts = {});

// Generic weighted sum y_j = h^d sum_m w(xi_j - xi_m) mu(xi_j, xi_m) phi_m
// with a difference-grid kernel w; pass phi = nullptr for phi == 1. One-shot
// assembly helper for the drift, flux and response right-hand sides.
Field kernel_mu_apply(const TorusGrid& grid, const Field& diff_values,
                      const CoefficientSpec& mu, const Field* phi = nullptr,
                      int threads = 1);

// Circular convolution y_j = sum_m w((j - m) mod N) g_m over the node lattice
// (no h^d factor).
Field circular_convolve(const TorusGrid& grid, const Field& diff_values, const Field& g);
// Correlation twin y_m = sum_j w((j - m) mod N) g_j.
Field circular_correlate(const TorusGrid& grid, const Field& diff_values, const Field& g);

}  // namespace nlhomog

#endif
