#include "nlhomog/krylov.hpp"

#include <cmath>
#include <vector>

namespace nlhomog {

namespace {

double weighted_norm(const TorusGrid& grid, const Field& v) {
    return std::sqrt(grid.inner(v, v));
}

void axpy(Field& y, double a, const Field& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

KrylovResult gmres(const std::function<Field(const Field&)>& apply, const Field& rhs,
                   const TorusGrid& grid, const KrylovOptions& opts) {
    const std::size_t n = rhs.size();
    const int m = opts.restart;
    KrylovResult result;
    result.x.assign(n, 0.0);

    const double rhs_norm = weighted_norm(grid, rhs);
    if (rhs_norm == 0.0) {
        result.converged = true;
        return result;
    }

    std::vector<Field> basis;          // Arnoldi vectors
    std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1);

    int total_iters = 0;
    while (total_iters < opts.max_iterations) {
        // residual at the current iterate
        Field r = apply(result.x);
        for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
        double beta = weighted_norm(grid, r);
        result.rel_residual = beta / rhs_norm;
        if (result.rel_residual < opts.rel_tol) {
            result.converged = true;
            return result;
        }

        basis.assign(1, r);
        for (std::size_t i = 0; i < n; ++i) basis[0][i] /= beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int j = 0;
        for (; j < m && total_iters < opts.max_iterations; ++j, ++total_iters) {
            Field w = apply(basis[j]);
            // modified Gram-Schmidt
            for (int i = 0; i <= j; ++i) {
                H[i][j] = grid.inner(w, basis[i]);
                axpy(w, -H[i][j], basis[i]);
            }
            H[j + 1][j] = weighted_norm(grid, w);
            bool breakdown = H[j + 1][j] < 1e-300;
            if (!breakdown) {
                for (std::size_t i = 0; i < n; ++i) w[i] /= H[j + 1][j];
                basis.push_back(std::move(w));
            }

            // previous Givens rotations on the new column
            for (int i = 0; i < j; ++i) {
                double t = cs[i] * H[i][j] + sn[i] * H[i + 1][j];
                H[i + 1][j] = -sn[i] * H[i][j] + cs[i] * H[i + 1][j];
                H[i][j] = t;
            }
            double denom = std::hypot(H[j][j], H[j + 1][j]);
            cs[j] = H[j][j] / denom;
            sn[j] = H[j + 1][j] / denom;
            H[j][j] = denom;
            H[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            result.iterations = total_iters + 1;
            if (std::abs(g[j + 1]) / rhs_norm < opts.rel_tol || breakdown) {
                ++j;
                break;
            }
        }

        // back substitution for the inner least squares
        std::vector<double> y(j, 0.0);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int k = i + 1; k < j; ++k) s -= H[i][k] * y[k];
            y[i] = s / H[i][i];
        }
        for (int i = 0; i < j; ++i) axpy(result.x, y[i], basis[i]);

        if (j == 0) break;  // no progress possible
    }

    Field r = apply(result.x);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    result.rel_residual = weighted_norm(grid, r) / rhs_norm;
    result.converged = result.rel_residual < opts.rel_tol;
    return result;
}

}  // namespace nlhomog
