#include "nlhomog/dense_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nlhomog/errors.hpp"

namespace nlhomog {

namespace {

// Direct lattice sum of w(z) = prod z_i^{alpha_i} a(z) over z = xi_j - xi_m + k.
// Deliberately separate from the adaptive periodization: fixed shell range
// derived from the decay radius.
double entry_lattice_sum(const ScalarKernel& kernel, const WeightIndex& alpha,
                         const Point& xj, const Point& xm, int dim) {
    const int reach = static_cast<int>(std::ceil(kernel.decay_radius)) + 2;
    double s = 0.0;
    if (dim == 1) {
        for (int k = -reach; k <= reach; ++k) {
            Point z{xj[0] - xm[0] + k, 0.0};
            double w = kernel(z);
            for (int a = 0; a < alpha[0]; ++a) w *= z[0];
            s += w;
        }
        return s;
    }
    for (int k0 = -reach; k0 <= reach; ++k0)
        for (int k1 = -reach; k1 <= reach; ++k1) {
            Point z{xj[0] - xm[0] + k0, xj[1] - xm[1] + k1};
            double w = kernel(z);
            for (int a = 0; a < alpha[0]; ++a) w *= z[0];
            for (int a = 0; a < alpha[1]; ++a) w *= z[1];
            s += w;
        }
    return s;
}

Eigen::MatrixXd weighted_matrix(const ScalarKernel& kernel, const WeightIndex& alpha,
                                const CoefficientSpec& mu, const TorusGrid& grid) {
    const std::int64_t n = grid.num_nodes();
    const double hd = grid.node_weight();
    Eigen::MatrixXd W(n, n);
    for (std::int64_t j = 0; j < n; ++j) {
        Point xj = grid.node(j);
        for (std::int64_t m = 0; m < n; ++m) {
            Point xm = grid.node(m);
            W(j, m) = hd * entry_lattice_sum(kernel, alpha, xj, xm, grid.dim()) *
                      mu.eval(xj, xm);
        }
    }
    return W;
}

// Least squares for the rank-deficient system stacked with the gauge row.
Field augmented_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& rhs, double hd) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd S(n + 1, n);
    S.topRows(n) = A;
    S.row(n).setConstant(hd);  // zero-mean gauge
    Eigen::VectorXd b(n + 1);
    b.head(n) = rhs;
    b(n) = 0.0;
    Eigen::VectorXd x = S.colPivHouseholderQr().solve(b);
    return Field(x.data(), x.data() + n);
}

}  // namespace

DenseCellSolution oracle_cell_solution(const KernelSpec& kernel, const CoefficientSpec& mu,
                                       const TorusGrid& grid) {
    if (grid.dim() != 1 || grid.points_per_dim() > 256)
        throw CapabilityError("oracle_cell_solution: dense path supports d = 1, N <= 256");

    const std::int64_t n = grid.num_nodes();
    const double hd = grid.node_weight();
    const int d = grid.dim();
    ScalarKernel k = evaluator(kernel);

    Eigen::MatrixXd K = weighted_matrix(k, {}, mu, grid);
    Eigen::VectorXd G = K.rowwise().sum();
    Eigen::MatrixXd A = K;
    A.diagonal() -= G;

    DenseCellSolution sol{grid, {}, {}, {}, {}, {}};

    // invariant weight: null vector of A^T, normalized to unit integral
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.transpose(), Eigen::ComputeFullV);
    Eigen::VectorXd v0 = svd.matrixV().col(n - 1);
    double mass = v0.sum() * hd;
    v0 /= mass;  // fixes the positive orientation as well
    sol.v0 = Field(v0.data(), v0.data() + n);

    std::array<Eigen::MatrixXd, kMaxDim> W1;
    for (int i = 0; i < d; ++i) {
        WeightIndex a{};
        a[i] = 1;
        W1[i] = weighted_matrix(k, a, mu, grid);
    }

    std::array<Eigen::VectorXd, kMaxDim> f;
    std::array<Eigen::VectorXd, kMaxDim> kappa1;
    for (int i = 0; i < d; ++i) {
        f[i] = W1[i].rowwise().sum();
        sol.b[i] = f[i].dot(v0) * hd;
        Eigen::VectorXd h = f[i].array() - sol.b[i];
        kappa1[i] = Eigen::Map<const Eigen::VectorXd>(
            augmented_solve(A, h, hd).data(), n);
        sol.kappa1[i] = Field(kappa1[i].data(), kappa1[i].data() + n);
    }

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            WeightIndex a{};
            a[i] += 1;
            a[j] += 1;
            Eigen::VectorXd w2 = weighted_matrix(k, a, mu, grid).rowwise().sum();
            Eigen::VectorXd F = sol.b[i] * kappa1[j] + 0.5 * w2 - W1[i] * kappa1[j];
            sol.theta[i][j] = F.dot(v0) * hd;
            Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, sol.theta[i][j]) - F;
            Field k2 = augmented_solve(A, rhs, hd);
            sol.kappa2[i][j] = std::move(k2);
        }
    return sol;
}

namespace {
double field_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

double OracleDiff::max() const {
    return std::max({v0, b, kappa1, kappa2, theta});
}

const char* OracleDiff::worst_field() const {
    double m = max();
    if (m == v0) return "v0";
    if (m == b) return "b";
    if (m == kappa1) return "kappa1";
    if (m == kappa2) return "kappa2";
    return "theta";
}

OracleDiff compare_with_oracle(const CellSolution& pipeline, const DenseCellSolution& oracle) {
    if (!(pipeline.grid == oracle.grid))
        throw InputError("compare_with_oracle: grid mismatch");
    const TorusGrid& grid = pipeline.grid;
    // corrector fields are compared in the shared zero-mean gauge as-is, so a
    // gauge violation on either side shows up as a field discrepancy
    OracleDiff diff;
    diff.v0 = field_diff(pipeline.v0, oracle.v0);
    for (int i = 0; i < grid.dim(); ++i) {
        diff.b = std::max(diff.b, std::abs(pipeline.b[i] - oracle.b[i]));
        diff.kappa1 = std::max(diff.kappa1, field_diff(pipeline.kappa1[i], oracle.kappa1[i]));
        for (int j = 0; j < grid.dim(); ++j) {
            diff.theta = std::max(diff.theta,
                                  std::abs(pipeline.theta[i][j] - oracle.theta[i][j]));
            diff.kappa2 = std::max(diff.kappa2, field_diff(pipeline.kappa2[i][j],
                                                           oracle.kappa2[i][j]));
        }
    }
    return diff;
}

}  // namespace nlhomog
