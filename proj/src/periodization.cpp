#include "nlhomog/periodization.hpp"

#include <cmath>

#include "nlhomog/errors.hpp"

namespace nlhomog {

namespace {

// Adds the contribution of the max-norm shell |k|_inf == shell to the values;
// returns the max-norm of what was added.
double add_shell(const ScalarKernel& kernel, const WeightIndex& alpha, const TorusGrid& grid,
                 int shell, Field& values) {
    const int d = grid.dim();
    double added_max = 0.0;

    auto accumulate = [&](const std::array<int, kMaxDim>& k) {
        for (std::int64_t r = 0; r < grid.num_nodes(); ++r) {
            Point eta = grid.node(r);
            Point z{};
            for (int i = 0; i < d; ++i) z[i] = eta[i] + k[i];
            double w = kernel(z);
            if (w == 0.0) continue;
            for (int i = 0; i < d; ++i)
                for (int a = 0; a < alpha[i]; ++a) w *= z[i];
            values[r] += w;
            double aw = std::abs(w);
            if (aw > added_max) added_max = aw;
        }
    };

    if (d == 1) {
        if (shell == 0) {
            accumulate({0, 0});
        } else {
            accumulate({-shell, 0});
            accumulate({shell, 0});
        }
        return added_max;
    }
    for (int k0 = -shell; k0 <= shell; ++k0)
        for (int k1 = -shell; k1 <= shell; ++k1)
            if (std::max(std::abs(k0), std::abs(k1)) == shell) accumulate({k0, k1});
    return added_max;
}

}  // namespace

PeriodizedKernel periodize_weighted(const ScalarKernel& kernel, const WeightIndex& alpha,
                                    const TorusGrid& grid, double tol, int shell_cap) {
    if (weight_order(alpha) > 2) throw InputError("periodize_weighted: |alpha| must be <= 2");
    if (!(tol > 0.0)) throw InputError("periodize_weighted: tol must be positive");
    if (kernel.dim != grid.dim())
        throw InputError("periodize_weighted: kernel/grid dimension mismatch");

    PeriodizedKernel out{grid, alpha, Field(grid.num_nodes(), 0.0), 0, 0.0};

    // Shells inside the decay radius always contribute; only after passing it
    // can a small shell certify the tail.
    const int min_shells = static_cast<int>(std::ceil(kernel.decay_radius)) + 1;

    for (int shell = 0; shell <= shell_cap; ++shell) {
        double added = add_shell(kernel, alpha, grid, shell, out.values);
        out.shells_used = shell;
        out.tail_bound = added;
        if (shell >= min_shells && added < tol) return out;
    }
    throw NumericalError("periodize_weighted: shell cap " + std::to_string(shell_cap) +
                             " reached without meeting tol",
                         out.tail_bound);
}

PeriodizedKernel periodize_weighted(const KernelSpec& spec, const WeightIndex& alpha,
                                    const TorusGrid& grid, double tol, int shell_cap) {
    return periodize_weighted(evaluator(spec), alpha, grid, tol, shell_cap);
}

WeightedKernelSet periodize_all(const KernelSpec& spec, const TorusGrid& grid, double tol) {
    ScalarKernel k = evaluator(spec);
    WeightedKernelSet set{periodize_weighted(k, {}, grid, tol), {}, {}};
    for (int i = 0; i < grid.dim(); ++i) {
        WeightIndex a{};
        a[i] = 1;
        set.first[i] = periodize_weighted(k, a, grid, tol);
    }
    for (int i = 0; i < grid.dim(); ++i)
        for (int j = i; j < grid.dim(); ++j) {
            WeightIndex a{};
            a[i] += 1;
            a[j] += 1;
            set.second[i][j] = periodize_weighted(k, a, grid, tol);
            if (j != i) set.second[j][i] = set.second[i][j];
        }
    return set;
}

}  // namespace nlhomog
