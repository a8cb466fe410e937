#include "nlhomog/cell.hpp"

#include <cmath>

#include "nlhomog/errors.hpp"
#include "nlhomog/krylov.hpp"

namespace nlhomog {

std::pair<Field, double> ground_state(const DiscreteOperatorPair& ops, double tol,
                                      int max_iter) {
    const TorusGrid& grid = ops.grid();
    const Field& G = ops.G_diag();
    const std::int64_t n = grid.num_nodes();

    Field v(n, 1.0);
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        Field w = ops.apply_adjoint(v);

        residual = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
            double r = std::abs(w[j] - G[j] * v[j]);
            if (r > residual) residual = r;
        }

        for (std::int64_t j = 0; j < n; ++j) w[j] /= G[j];
        double mass = grid.quadrature(w);
        for (std::int64_t j = 0; j < n; ++j) w[j] /= mass;

        double update = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
            double u = std::abs(w[j] - v[j]);
            if (u > update) update = u;
        }
        v = std::move(w);
        if (update < tol && residual < tol) {
            for (double x : v)
                if (!(x > 0.0))
                    throw NumericalError(
                        "ground_state: converged weight has a nonpositive entry; "
                        "discretization too coarse for this kernel",
                        residual);
            return {std::move(v), residual};
        }
    }
    throw NumericalError("ground_state: no convergence within " + std::to_string(max_iter) +
                             " iterations",
                         residual);
}

Field ground_state_eigenfunction(const DiscreteOperatorPair& ops, const Field& v0) {
    const TorusGrid& grid = ops.grid();
    Field psi(grid.num_nodes());
    for (std::int64_t j = 0; j < grid.num_nodes(); ++j) psi[j] = ops.G_diag()[j] * v0[j];
    double norm = std::sqrt(grid.inner(psi, psi));
    for (double& x : psi) x /= norm;
    for (double x : psi)
        if (!(x > 0.0))
            throw NumericalError("ground_state_eigenfunction: lost positivity", x);
    return psi;
}

DriftRhs drift_and_rhs(const TorusGrid& grid, const WeightedKernelSet& kernels,
                       const CoefficientSpec& mu, const Field& v0, int threads) {
    DriftRhs out;
    for (int i = 0; i < grid.dim(); ++i) {
        out.f[i] = kernel_mu_apply(grid, kernels.first[i].values, mu, nullptr, threads);
        out.b[i] = grid.inner(out.f[i], v0);
        out.h[i] = out.f[i];
        for (double& x : out.h[i]) x -= out.b[i];
        double s = std::abs(grid.inner(out.h[i], v0));
        if (s > out.solvability) out.solvability = s;
    }
    return out;
}

std::pair<Field, double> solve_singular(const DiscreteOperatorPair& ops, const Field& rhs,
                                        double tol, int max_iterations) {
    const TorusGrid& grid = ops.grid();
    const Field& G = ops.G_diag();
    const std::int64_t n = grid.num_nodes();

    auto shifted = [&](const Field& x) {
        Field y = ops.apply_A(x);
        double mean = grid.quadrature(x);
        for (std::int64_t j = 0; j < n; ++j) y[j] = y[j] / G[j] + mean;
        return y;
    };
    Field b(n);
    for (std::int64_t j = 0; j < n; ++j) b[j] = rhs[j] / G[j];

    KrylovOptions opts;
    opts.max_iterations = max_iterations;
    KrylovResult res = gmres(shifted, b, grid, opts);

    // exact gauge, then the contract residual on the unpreconditioned system
    double mean = grid.quadrature(res.x);
    for (std::int64_t j = 0; j < n; ++j) res.x[j] -= mean;
    Field ax = ops.apply_A(res.x);
    double contract = 0.0;
    for (std::int64_t j = 0; j < n; ++j)
        contract = std::max(contract, std::abs(ax[j] - rhs[j]));
    if (contract > tol)
        throw NumericalError("solve_singular: Krylov stagnation, residual above tolerance",
                             contract);
    return {std::move(res.x), contract};
}

std::pair<std::array<Field, kMaxDim>, double> solve_corrector1(
    const DiscreteOperatorPair& ops, const DriftRhs& rhs, const Field& v0,
    const CellTolerances& tols) {
    const TorusGrid& grid = ops.grid();
    for (int i = 0; i < grid.dim(); ++i) {
        double s = std::abs(grid.inner(rhs.h[i], v0));
        if (s > tols.solvability)
            throw InputError("solve_corrector1: right-hand side not orthogonal to the "
                             "invariant weight; drift is inconsistent (residual " +
                             std::to_string(s) + ")");
    }
    std::array<Field, kMaxDim> kappa;
    double residual = 0.0;
    for (int i = 0; i < grid.dim(); ++i) {
        auto [x, r] = solve_singular(ops, rhs.h[i], tols.corrector, tols.krylov_max_iterations);
        kappa[i] = std::move(x);
        residual = std::max(residual, r);
    }
    return {std::move(kappa), residual};
}

EffectiveMatrix effective_matrix(const std::array<Field, kMaxDim>& kappa1, const Point& b,
                                 const Field& v0, const WeightedKernelSet& kernels,
                                 const CoefficientSpec& mu, const TorusGrid& grid,
                                 int threads) {
    const int d = grid.dim();
    const std::int64_t n = grid.num_nodes();
    EffectiveMatrix out;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Field second = kernel_mu_apply(grid, kernels.second[i][j].values, mu, nullptr,
                                           threads);
            Field cross = kernel_mu_apply(grid, kernels.first[i].values, mu, &kappa1[j],
                                          threads);
            Field F(n);
            for (std::int64_t s = 0; s < n; ++s)
                F[s] = b[i] * kappa1[j][s] + 0.5 * second[s] - cross[s];
            out.theta[i][j] = grid.inner(F, v0);
            out.F[i][j] = std::move(F);
        }
    }
    return out;
}

DMat flux_matrix_I(const std::array<Field, kMaxDim>& kappa1, const Field& v0,
                   const WeightedKernelSet& kernels, const CoefficientSpec& mu,
                   const TorusGrid& grid, int threads) {
    const int d = grid.dim();
    const std::int64_t n = grid.num_nodes();

    // reusable pieces of the expanded square
    std::array<Field, kMaxDim> f;      // first-moment sums
    std::array<Field, kMaxDim> Kk;     // K kappa^i
    for (int i = 0; i < d; ++i) {
        f[i] = kernel_mu_apply(grid, kernels.first[i].values, mu, nullptr, threads);
        Kk[i] = kernel_mu_apply(grid, kernels.plain.values, mu, &kappa1[i], threads);
    }
    Field G = kernel_mu_apply(grid, kernels.plain.values, mu, nullptr, threads);

    DMat I{};
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            // displacement (x) displacement
            Field second = kernel_mu_apply(grid, kernels.second[i][j].values, mu, nullptr,
                                           threads);
            Field crossij = kernel_mu_apply(grid, kernels.first[i].values, mu, &kappa1[j],
                                            threads);
            Field crossji = kernel_mu_apply(grid, kernels.first[j].values, mu, &kappa1[i],
                                            threads);
            Field prod(n);
            for (std::int64_t s = 0; s < n; ++s) prod[s] = kappa1[i][s] * kappa1[j][s];
            Field Kprod = kernel_mu_apply(grid, kernels.plain.values, mu, &prod, threads);

            double acc = 0.0;
            for (std::int64_t s = 0; s < n; ++s) {
                double disp2 = second[s];
                double cross = kappa1[j][s] * f[i][s] - crossij[s] +
                               kappa1[i][s] * f[j][s] - crossji[s];
                double kdiff = prod[s] * G[s] - kappa1[i][s] * Kk[j][s] -
                               kappa1[j][s] * Kk[i][s] + Kprod[s];
                acc += (disp2 + cross + kdiff) * v0[s];
            }
            I[i][j] = acc * grid.node_weight();
        }
    }
    return I;
}

std::pair<std::array<std::array<Field, kMaxDim>, kMaxDim>, double> solve_corrector2(
    const DiscreteOperatorPair& ops, const EffectiveMatrix& eff, const Field& v0,
    const CellTolerances& tols) {
    const TorusGrid& grid = ops.grid();
    const std::int64_t n = grid.num_nodes();
    std::array<std::array<Field, kMaxDim>, kMaxDim> kappa2;
    double residual = 0.0;
    for (int i = 0; i < grid.dim(); ++i) {
        for (int j = 0; j < grid.dim(); ++j) {
            // -A kappa2 = F - Theta, solved as A kappa2 = Theta - F
            Field rhs(n);
            for (std::int64_t s = 0; s < n; ++s)
                rhs[s] = eff.theta[i][j] - eff.F[i][j][s];
            double solv = std::abs(grid.inner(rhs, v0));
            if (solv > tols.solvability)
                throw InputError("solve_corrector2: F - Theta not orthogonal to the "
                                 "invariant weight (residual " + std::to_string(solv) + ")");
            auto [x, r] = solve_singular(ops, rhs, tols.corrector, tols.krylov_max_iterations);
            kappa2[i][j] = std::move(x);
            residual = std::max(residual, r);
        }
    }
    return {std::move(kappa2), residual};
}

CellSolution solve_cell(const KernelSpec& kernel, const CoefficientSpec& mu,
                        const TorusGrid& grid, const CellTolerances& tols, int threads) {
    WeightedKernelSet kernels = periodize_all(kernel, grid, tols.periodization);
    AssembleOptions aopts;
    aopts.threads = threads;
    DiscreteOperatorPair ops = assemble_operators(kernels.plain, mu, grid, aopts);

    CellSolution sol{grid, {}, {}, {}, {}, {}, {}, {}};
    auto [v0, gs_res] = ground_state(ops, tols.ground_state, tols.ground_state_max_iter);
    sol.v0 = std::move(v0);
    sol.residuals.ground_state = gs_res;

    DriftRhs rhs = drift_and_rhs(grid, kernels, mu, sol.v0, threads);
    sol.b = rhs.b;
    sol.residuals.solvability = rhs.solvability;

    auto [kappa1, c1_res] = solve_corrector1(ops, rhs, sol.v0, tols);
    sol.kappa1 = std::move(kappa1);
    sol.residuals.corrector1 = c1_res;

    EffectiveMatrix eff = effective_matrix(sol.kappa1, sol.b, sol.v0, kernels, mu, grid,
                                           threads);
    sol.theta = eff.theta;
    sol.flux_I = flux_matrix_I(sol.kappa1, sol.v0, kernels, mu, grid, threads);

    auto [kappa2, c2_res] = solve_corrector2(ops, eff, sol.v0, tols);
    sol.kappa2 = std::move(kappa2);
    sol.residuals.corrector2 = c2_res;
    return sol;
}

Point effective_drift_only(const KernelSpec& kernel, const CoefficientSpec& mu,
                           const TorusGrid& grid, const CellTolerances& tols, int threads) {
    ScalarKernel k = evaluator(kernel);
    PeriodizedKernel plain = periodize_weighted(k, {}, grid, tols.periodization);
    AssembleOptions aopts;
    aopts.threads = threads;
    DiscreteOperatorPair ops = assemble_operators(plain, mu, grid, aopts);
    auto [v0, res] = ground_state(ops, tols.ground_state, tols.ground_state_max_iter);

    Point b{};
    for (int i = 0; i < grid.dim(); ++i) {
        WeightIndex a{};
        a[i] = 1;
        PeriodizedKernel wi = periodize_weighted(k, a, grid, tols.periodization);
        Field f = kernel_mu_apply(grid, wi.values, mu, nullptr, threads);
        b[i] = grid.inner(f, v0);
    }
    return b;
}

}  // namespace nlhomog
