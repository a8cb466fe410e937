#include "nlhomog/einstein.hpp"

#include <cmath>

#include "nlhomog/errors.hpp"
#include "nlhomog/parallel.hpp"

namespace nlhomog {

namespace {

double max_abs_entry(const DMat& m, int d) {
    double r = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) r = std::max(r, std::abs(m[i][j]));
    return r;
}

DMat entry_diff(const DMat& a, const DMat& b, int d) {
    DMat out{};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[i][j] = a[i][j] - b[i][j];
    return out;
}

}  // namespace

PerturbationFamily cutoff_perturbation_family(const KernelSpec& a_sym) {
    return [a_sym](const Point& ell) {
        return PerturbationSpec::cutoff_family(a_sym, ell);
    };
}

std::array<Field, kMaxDim> solve_phi0(const KernelSpec& a_sym, const PerturbationSpec& c,
                                      const CoefficientSpec& mu, const TorusGrid& grid,
                                      const CellTolerances& tols, int threads) {
    if (!mu.is_symmetric())
        throw InputError("solve_phi0: mu must be symmetric for the response problem");
    if (c.dim() != a_sym.dim()) throw InputError("solve_phi0: dimension mismatch");

    PeriodizedKernel plain = periodize_weighted(a_sym, {}, grid, tols.periodization);
    AssembleOptions aopts;
    aopts.threads = threads;
    DiscreteOperatorPair ops = assemble_operators(plain, mu, grid, aopts);

    // symmetric case: the adjoint null vector is the constant 1
    Field ones(grid.num_nodes(), 1.0);
    std::array<Field, kMaxDim> phi0;
    for (int i = 0; i < grid.dim(); ++i) {
        PeriodizedKernel chat = periodize_weighted(c.components()[i], {}, grid,
                                                   tols.periodization);
        Field rhs = kernel_mu_apply(grid, chat.values, mu, nullptr, threads);
        for (double& x : rhs) x *= 2.0;
        double solv = std::abs(grid.inner(rhs, ones));
        if (solv > tols.solvability)
            throw InputError("solve_phi0: right-hand side has nonzero mean (" +
                             std::to_string(solv) +
                             "); kernel symmetry or antisymmetry violated");
        auto [x, r] = solve_singular(ops, rhs, tols.corrector, tols.krylov_max_iterations);
        (void)r;
        phi0[i] = std::move(x);
    }
    return phi0;
}

DMat drift_linearization(const KernelSpec& a_sym, const PerturbationSpec& c,
                         const CoefficientSpec& mu, const TorusGrid& grid,
                         const std::array<Field, kMaxDim>& phi0,
                         const CellTolerances& tols, int threads) {
    const int d = grid.dim();
    ScalarKernel base = evaluator(a_sym);
    DMat B{};
    for (int i = 0; i < d; ++i) {
        WeightIndex wi{};
        wi[i] = 1;
        PeriodizedKernel a_first = periodize_weighted(base, wi, grid, tols.periodization);
        Field f_sym = kernel_mu_apply(grid, a_first.values, mu, nullptr, threads);
        for (int j = 0; j < d; ++j) {
            PeriodizedKernel c_first =
                periodize_weighted(c.components()[j], wi, grid, tols.periodization);
            Field cw = kernel_mu_apply(grid, c_first.values, mu, nullptr, threads);
            B[i][j] = grid.quadrature(cw) + grid.inner(f_sym, phi0[j]);
        }
    }
    return B;
}

FdJacobian drift_finite_difference(const KernelSpec& a_sym, const PerturbationFamily& family,
                                   const CoefficientSpec& mu, const TorusGrid& grid,
                                   const std::vector<double>& h_steps,
                                   const CellTolerances& tols, int threads) {
    if (h_steps.size() < 2)
        throw InputError("drift_finite_difference: need at least two steps for Richardson");
    std::vector<double> steps = h_steps;
    std::sort(steps.begin(), steps.end(), std::greater<double>());

    const int d = grid.dim();
    FdJacobian out;
    out.steps = steps;

    // all (step, axis, sign) drift runs are independent
    struct Task { int step; int axis; int sign; };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < steps.size(); ++s)
        for (int j = 0; j < d; ++j)
            for (int sign : {+1, -1}) tasks.push_back({static_cast<int>(s), j, sign});
    std::vector<Point> drifts(tasks.size());
    parallel_for(static_cast<std::int64_t>(tasks.size()), threads,
                 [&](std::int64_t lo, std::int64_t hi) {
                     for (std::int64_t t = lo; t < hi; ++t) {
                         const Task& task = tasks[t];
                         Point ell{};
                         ell[task.axis] = task.sign * steps[task.step];
                         auto pert = std::make_shared<const PerturbationSpec>(family(ell));
                         KernelSpec biased = KernelSpec::composite_biased(a_sym, pert);
                         drifts[t] = effective_drift_only(biased, mu, grid, tols, 1);
                     }
                 });

    auto drift_at = [&](int step, int axis, int sign) -> const Point& {
        for (std::size_t t = 0; t < tasks.size(); ++t)
            if (tasks[t].step == step && tasks[t].axis == axis && tasks[t].sign == sign)
                return drifts[t];
        throw InputError("drift_finite_difference: internal task lookup");
    };

    for (std::size_t s = 0; s < steps.size(); ++s) {
        DMat D{};
        for (int j = 0; j < d; ++j) {
            const Point& bp = drift_at(static_cast<int>(s), j, +1);
            const Point& bm = drift_at(static_cast<int>(s), j, -1);
            for (int i = 0; i < d; ++i) D[i][j] = (bp[i] - bm[i]) / (2.0 * steps[s]);
        }
        out.per_step.push_back(D);
    }
    for (std::size_t s = 0; s + 1 < out.per_step.size(); ++s)
        out.step_decay.push_back(
            max_abs_entry(entry_diff(out.per_step[s], out.per_step[s + 1], d), d));

    // one Richardson level on the two finest steps (assumes h, h/2 spacing)
    const DMat& coarse = out.per_step[out.per_step.size() - 2];
    const DMat& fine = out.per_step.back();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            out.jacobian[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
    return out;
}

EinsteinReport einstein_check(const KernelSpec& a_sym, const CoefficientSpec& mu,
                              const TorusGrid& grid, const std::vector<double>& fd_steps,
                              const CellTolerances& tols, int threads) {
    if (!mu.is_symmetric())
        throw InputError("einstein_check: mu must be symmetric");
    const int d = grid.dim();

    CellSolution sym = solve_cell(a_sym, mu, grid, tols, threads);

    EinsteinReport rep;
    rep.theta_sym = sym.theta;
    rep.I_sym = sym.flux_I;
    rep.fd_steps = fd_steps;

    // linearized route, evaluated at ell = 0 where the cutoff is identically 1
    PerturbationSpec c0 = PerturbationSpec::cutoff_family(a_sym, Point{});
    rep.phi0 = solve_phi0(a_sym, c0, mu, grid, tols, threads);
    rep.B_lin = drift_linearization(a_sym, c0, mu, grid, rep.phi0, tols, threads);

    FdJacobian fd = drift_finite_difference(a_sym, cutoff_perturbation_family(a_sym), mu,
                                            grid, fd_steps, tols, threads);
    rep.B_fd = fd.jacobian;
    rep.fd_per_step = fd.per_step;
    rep.fd_step_decay = fd.step_decay;

    DMat twice{};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) twice[i][j] = 2.0 * sym.theta[i][j];
    rep.max_dev_lin = max_abs_entry(entry_diff(rep.B_lin, twice, d), d);
    rep.max_dev_fd = max_abs_entry(entry_diff(rep.B_fd, twice, d), d);
    rep.max_dev_routes = max_abs_entry(entry_diff(rep.B_lin, rep.B_fd, d), d);

    double dev = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double sym_part = 0.5 * (twice[i][j] + twice[j][i]);
            dev = std::max(dev, std::abs(sym_part - rep.I_sym[i][j]));
        }
    rep.sym_identity_dev = dev;
    return rep;
}

}  // namespace nlhomog
