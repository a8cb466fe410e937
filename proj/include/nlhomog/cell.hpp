#ifndef NLHOMOG_CELL_HPP
#define NLHOMOG_CELL_HPP

#include <array>
#include <utility>

#include "nlhomog/coefficients.hpp"
#include "nlhomog/grid.hpp"
#include "nlhomog/kernels.hpp"
#include "nlhomog/operators.hpp"
#include "nlhomog/periodization.hpp"

namespace nlhomog {

struct CellTolerances {
    double ground_state = 1e-12;
    double corrector = 1e-10;
    double solvability = 1e-10;
    double periodization = 1e-13;
    int ground_state_max_iter = 50000;
    int krylov_max_iterations = 5000;
};

struct CellResiduals {
    double ground_state = 0.0;  // ||K* v0 - G v0||_inf
    double solvability = 0.0;   // max_i |<h^i, v0>|
    double corrector1 = 0.0;    // max_i ||A kappa1^i - h^i||_inf
    double corrector2 = 0.0;    // max_ij ||A kappa2^ij - (Theta^ij - F^ij)||_inf
};

// Everything the cell pipeline produces: the invariant weight v0 (positive,
// unit integral), the effective drift b, the two correctors in the zero-mean
// gauge, the effective matrix Theta, the flux matrix I = Theta + Theta^T, and
// the residuals certifying each stage.
struct CellSolution {
    TorusGrid grid;
    Field v0;
    Point b{};
    std::array<Field, kMaxDim> kappa1;
    std::array<std::array<Field, kMaxDim>, kMaxDim> kappa2;
    DMat theta{};
    DMat flux_I{};
    CellResiduals residuals;
};

// Fixed-point sweep v <- K* v / G, renormalized to unit integral, until both
// the update and the residual ||K* v - G v||_inf drop below tol. The top
// eigenvalue is exactly 1 (K 1 = G), so no Rayleigh quotient is needed.
std::pair<Field, double> ground_state(const DiscreteOperatorPair& ops, double tol,
                                      int max_iter);

// The adjoint eigenfunction is not stored; it is recovered as G v0,
// normalized to unit L^2 norm. Strict positivity is checked on the way out.
Field ground_state_eigenfunction(const DiscreteOperatorPair& ops, const Field& v0);

struct DriftRhs {
    Point b{};
    std::array<Field, kMaxDim> f;  // first-moment flux field per component
    std::array<Field, kMaxDim> h;  // f - b, the corrector right-hand side
    double solvability = 0.0;
};

DriftRhs drift_and_rhs(const TorusGrid& grid, const WeightedKernelSet& kernels,
                       const CoefficientSpec& mu, const Field& v0, int threads = 1);

// Solves (K - G) kappa = rhs on the zero-mean gauge subspace. The singular
// direction (constants) is removed by a rank-one shift of the
// G-preconditioned operator, which is nonsingular whenever the discrete
// Perron eigenvalue is simple; the returned field is re-centered and the
// contract residual is checked in the max norm.
std::pair<Field, double> solve_singular(const DiscreteOperatorPair& ops, const Field& rhs,
                                        double tol, int max_iterations = 5000);

std::pair<std::array<Field, kMaxDim>, double> solve_corrector1(
    const DiscreteOperatorPair& ops, const DriftRhs& rhs, const Field& v0,
    const CellTolerances& tols);

struct EffectiveMatrix {
    DMat theta{};
    std::array<std::array<Field, kMaxDim>, kMaxDim> F;  // integrand fields
};

EffectiveMatrix effective_matrix(const std::array<Field, kMaxDim>& kappa1, const Point& b,
                                 const Field& v0, const WeightedKernelSet& kernels,
                                 const CoefficientSpec& mu, const TorusGrid& grid,
                                 int threads = 1);

DMat flux_matrix_I(const std::array<Field, kMaxDim>& kappa1, const Field& v0,
                   const WeightedKernelSet& kernels, const CoefficientSpec& mu,
                   const TorusGrid& grid, int threads = 1);

std::pair<std::array<std::array<Field, kMaxDim>, kMaxDim>, double> solve_corrector2(
    const DiscreteOperatorPair& ops, const EffectiveMatrix& eff, const Field& v0,
    const CellTolerances& tols);

// Full pipeline: periodize, assemble, ground state, drift, correctors,
// effective and flux matrices.
CellSolution solve_cell(const KernelSpec& kernel, const CoefficientSpec& mu,
                        const TorusGrid& grid, const CellTolerances& tols = {},
                        int threads = 1);

// Drift-only pipeline (ground state + first-moment average); used by the
// finite-difference response study where the correctors are not needed.
Point effective_drift_only(const KernelSpec& kernel, const CoefficientSpec& mu,
                           const TorusGrid& grid, const CellTolerances& tols = {},
                           int threads = 1);

}  // namespace nlhomog

#endif
