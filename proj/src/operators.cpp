#include "nlhomog/operators.hpp"

#include "nlhomog/errors.hpp"
#include "nlhomog/parallel.hpp"

namespace nlhomog {

namespace {

std::vector<Point> all_nodes(const TorusGrid& grid) {
    std::vector<Point> nodes(grid.num_nodes());
    for (std::int64_t j = 0; j < grid.num_nodes(); ++j) nodes[j] = grid.node(j);
    return nodes;
}

}  // namespace

Field circular_convolve(const TorusGrid& grid, const Field& diff_values, const Field& g) {
    const std::int64_t n = grid.num_nodes();
    Field out(n, 0.0);
    if (grid.dim() == 1) {
        const int N = grid.points_per_dim();
        for (int j = 0; j < N; ++j) {
            double s = 0.0;
            for (int m = 0; m < N; ++m) {
                int d = j - m;
                if (d < 0) d += N;
                s += diff_values[d] * g[m];
            }
            out[j] = s;
        }
        return out;
    }
    for (std::int64_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::int64_t m = 0; m < n; ++m) s += diff_values[grid.diff_index(j, m)] * g[m];
        out[j] = s;
    }
    return out;
}

Field circular_correlate(const TorusGrid& grid, const Field& diff_values, const Field& g) {
    const std::int64_t n = grid.num_nodes();
    Field out(n, 0.0);
    if (grid.dim() == 1) {
        const int N = grid.points_per_dim();
        for (int m = 0; m < N; ++m) {
            double s = 0.0;
            for (int j = 0; j < N; ++j) {
                int d = j - m;
                if (d < 0) d += N;
                s += diff_values[d] * g[j];
            }
            out[m] = s;
        }
        return out;
    }
    for (std::int64_t m = 0; m < n; ++m) {
        double s = 0.0;
        for (std::int64_t j = 0; j < n; ++j) s += diff_values[grid.diff_index(j, m)] * g[j];
        out[m] = s;
    }
    return out;
}

DiscreteOperatorPair assemble_operators(const PeriodizedKernel& a_hat,
                                        const CoefficientSpec& mu, const TorusGrid& grid,
                                        const AssembleOptions& opts) {
    if (!(a_hat.grid == grid))
        throw InputError("assemble_operators: grid does not match kernel resolution");
    if (weight_order(a_hat.alpha) != 0)
        throw InputError("assemble_operators: expected the alpha = 0 periodization");

    const std::int64_t n = grid.num_nodes();
    bool want_dense = false;
    switch (opts.storage) {
        case OperatorStorage::dense:
        case OperatorStorage::auto_select:
            want_dense = n <= opts.dense_node_cap;  // over the cap: fall back
            break;
        case OperatorStorage::matrix_free:
            want_dense = false;
            break;
    }
    if (!want_dense && !mu.is_separable())
        throw CapabilityError(
            "assemble_operators: matrix-free form needs constant or separable mu; "
            "this size requires dense storage");

    DiscreteOperatorPair ops(grid);
    const double hd = grid.node_weight();

    if (want_dense) {
        auto nodes = all_nodes(grid);
        ops.dense_.emplace(n, n);
        Eigen::MatrixXd& M = *ops.dense_;
        parallel_for(n, opts.threads, [&](std::int64_t b, std::int64_t e) {
            for (std::int64_t j = b; j < e; ++j)
                for (std::int64_t m = 0; m < n; ++m)
                    M(j, m) = hd * a_hat.values[grid.diff_index(j, m)] *
                              mu.eval(nodes[j], nodes[m]);
        });
    } else {
        auto nodes = all_nodes(grid);
        ops.a_hat_ = a_hat.values;
        ops.lambda_.resize(n);
        ops.nu_.resize(n);
        for (std::int64_t j = 0; j < n; ++j) {
            ops.lambda_[j] = mu.lambda_factor(nodes[j]);
            ops.nu_[j] = mu.nu_factor(nodes[j]);
        }
    }

    // G is K applied to the constant-one field: the identity K 1 = G then
    // holds by construction, bit for bit.
    ops.g_diag_ = ops.apply(Field(n, 1.0));
    for (double g : ops.g_diag_)
        if (!(g > 0.0))
            throw NumericalError("assemble_operators: G is not strictly positive", g);
    return ops;
}

Field DiscreteOperatorPair::apply(const Field& phi) const {
    const std::int64_t n = grid_.num_nodes();
    if (dense_) {
        Eigen::Map<const Eigen::VectorXd> x(phi.data(), n);
        Eigen::VectorXd y = (*dense_) * x;
        return Field(y.data(), y.data() + n);
    }
    Field nug(n);
    for (std::int64_t m = 0; m < n; ++m) nug[m] = nu_[m] * phi[m];
    Field conv = circular_convolve(grid_, a_hat_, nug);
    const double hd = grid_.node_weight();
    for (std::int64_t j = 0; j < n; ++j) conv[j] *= hd * lambda_[j];
    return conv;
}

Field DiscreteOperatorPair::apply_adjoint(const Field& psi) const {
    const std::int64_t n = grid_.num_nodes();
    if (dense_) {
        Eigen::Map<const Eigen::VectorXd> x(psi.data(), n);
        Eigen::VectorXd y = dense_->transpose() * x;
        return Field(y.data(), y.data() + n);
    }
    Field lg(n);
    for (std::int64_t j = 0; j < n; ++j) lg[j] = lambda_[j] * psi[j];
    Field corr = circular_correlate(grid_, a_hat_, lg);
    const double hd = grid_.node_weight();
    for (std::int64_t m = 0; m < n; ++m) corr[m] *= hd * nu_[m];
    return corr;
}

Field DiscreteOperatorPair::apply_A(const Field& phi) const {
    Field y = apply(phi);
    for (std::int64_t j = 0; j < grid_.num_nodes(); ++j) y[j] -= g_diag_[j] * phi[j];
    return y;
}

Field kernel_mu_apply(const TorusGrid& grid, const Field& diff_values,
                      const CoefficientSpec& mu, const Field* phi, int threads) {
    const std::int64_t n = grid.num_nodes();
    auto nodes = all_nodes(grid);
    Field out(n, 0.0);
    const double hd = grid.node_weight();
    parallel_for(n, threads, [&](std::int64_t b, std::int64_t e) {
        for (std::int64_t j = b; j < e; ++j) {
            double s = 0.0;
            for (std::int64_t m = 0; m < n; ++m) {
                double v = diff_values[grid.diff_index(j, m)] * mu.eval(nodes[j], nodes[m]);
                s += phi ? v * (*phi)[m] : v;
            }
            out[j] = hd * s;
        }
    });
    return out;
}

}  // namespace nlhomog
