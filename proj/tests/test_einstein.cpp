#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "nlhomog/einstein.hpp"
#include "nlhomog/errors.hpp"

using namespace nlhomog;

namespace {

KernelSpec sym_gauss() { return KernelSpec::gaussian(1, 0.2); }

std::vector<double> asym_table(int n) {
    // swap-symmetric but not point-symmetric, so the drift response keeps a
    // genuine quadratic term for the even-part test
    std::vector<double> t(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = 2 * M_PI * i / n, y = 2 * M_PI * j / n;
            t[i * n + j] = 1.0 + 0.3 * std::sin(x + 0.7) * std::sin(y + 0.7) +
                           0.1 * (std::cos(x) + std::cos(y));
        }
    return t;
}

double field_gap(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("response vanishes for constant mu") {
    TorusGrid g(1, 64);
    PerturbationSpec c0 = PerturbationSpec::cutoff_family(sym_gauss(), Point{});
    auto phi0 = solve_phi0(sym_gauss(), c0, CoefficientSpec::constant(1, 1.0), g);
    for (double v : phi0[0]) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("response requires a symmetric coefficient") {
    TorusGrid g(1, 32);
    PerturbationSpec c0 = PerturbationSpec::cutoff_family(sym_gauss(), Point{});
    CHECK_THROWS_AS(solve_phi0(sym_gauss(), c0, CoefficientSpec::separable(1, 0.4, 0.1), g),
                    InputError);
}

TEST_CASE("small-ell response approaches twice the symmetric corrector") {
    TorusGrid g(1, 128);
    KernelSpec a = sym_gauss();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    CellSolution sym = solve_cell(a, mu, g);

    PerturbationSpec c_small = PerturbationSpec::cutoff_family(a, Point{1e-2});
    auto phi0 = solve_phi0(a, c_small, mu, g);
    Field twice = sym.kappa1[0];
    for (double& v : twice) v *= 2.0;
    CHECK(field_gap(phi0[0], twice) <= 1e-3);
}

TEST_CASE("response matches a dense augmented solve for a generic perturbation") {
    TorusGrid g(1, 64);
    KernelSpec a = sym_gauss();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    PerturbationSpec c = PerturbationSpec::odd_gaussian(1, 0.15, 0.6, Point{0.1});
    auto phi0 = solve_phi0(a, c, mu, g);

    // independent dense route assembled in the test
    const std::int64_t n = g.num_nodes();
    const double hd = g.node_weight();
    PeriodizedKernel ph = periodize_weighted(a, {}, g);
    Eigen::MatrixXd A(n, n);
    for (std::int64_t j = 0; j < n; ++j)
        for (std::int64_t m = 0; m < n; ++m)
            A(j, m) = hd * ph.values[g.diff_index(j, m)] * mu.eval(g.node(j), g.node(m));
    Eigen::VectorXd G = A.rowwise().sum();
    A.diagonal() -= G;

    PeriodizedKernel chat = periodize_weighted(c.components()[0], {}, g);
    Field rhs_field = kernel_mu_apply(g, chat.values, mu);
    Eigen::VectorXd rhs(n);
    for (std::int64_t j = 0; j < n; ++j) rhs(j) = 2.0 * rhs_field[j];

    Eigen::MatrixXd S(n + 1, n);
    S.topRows(n) = A;
    S.row(n).setConstant(hd);
    Eigen::VectorXd b(n + 1);
    b.head(n) = rhs;
    b(n) = 0.0;
    Eigen::VectorXd x = S.colPivHouseholderQr().solve(b);

    double gap = 0.0;
    for (std::int64_t j = 0; j < n; ++j) gap = std::max(gap, std::abs(phi0[0][j] - x(j)));
    CHECK(gap <= 1e-8);
}

TEST_CASE("antisymmetric kernels average to zero against symmetric mu") {
    TorusGrid g(1, 64);
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    for (double ell : {0.0, 0.7}) {
        PerturbationSpec c = PerturbationSpec::cutoff_family(sym_gauss(), Point{ell});
        PeriodizedKernel chat = periodize_weighted(c.components()[0], {}, g);
        Field s = kernel_mu_apply(g, chat.values, mu);
        CHECK(std::abs(g.quadrature(s)) <= 1e-10);
    }
}

TEST_CASE("linearized drift closed form for constant mu") {
    TorusGrid g(1, 64);
    auto mu = CoefficientSpec::constant(1, 1.0);
    PerturbationSpec c0 = PerturbationSpec::cutoff_family(sym_gauss(), Point{});
    auto phi0 = solve_phi0(sym_gauss(), c0, mu, g);
    DMat B = drift_linearization(sym_gauss(), c0, mu, g, phi0);
    CHECK(B[0][0] == doctest::Approx(0.04).epsilon(1e-8));

    // zero perturbation gives zero response
    PerturbationSpec cz = PerturbationSpec::odd_gaussian(1, 0.2, 0.0, Point{});
    auto phi0z = solve_phi0(sym_gauss(), cz, mu, g);
    DMat Bz = drift_linearization(sym_gauss(), cz, mu, g, phi0z);
    CHECK(std::abs(Bz[0][0]) <= 1e-14);
}

TEST_CASE("both jacobian routes agree with twice the effective matrix") {
    TorusGrid g(1, 96);
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    EinsteinReport rep = einstein_check(sym_gauss(), mu, g);
    CHECK(rep.max_dev_lin <= 1e-4);
    CHECK(rep.max_dev_fd <= 1e-4);
    CHECK(rep.max_dev_routes <= 1e-5);
    CHECK(rep.sym_identity_dev <= 1e-10);
    // observed O(h^2) decay of the central differences
    REQUIRE(rep.fd_step_decay.size() == 2);
    double ratio = rep.fd_step_decay[0] / rep.fd_step_decay[1];
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
    // gauge of the response fields
    for (int i = 0; i < 1; ++i) CHECK(std::abs(g.quadrature(rep.phi0[i])) <= 1e-13);
}

TEST_CASE("einstein relation is exact for constant mu") {
    TorusGrid g(1, 64);
    EinsteinReport rep = einstein_check(sym_gauss(), CoefficientSpec::constant(1, 1.0), g);
    CHECK(rep.B_lin[0][0] == doctest::Approx(0.04).epsilon(1e-6));
    CHECK(rep.B_fd[0][0] == doctest::Approx(0.04).epsilon(1e-6));
    CHECK(2.0 * rep.theta_sym[0][0] == doctest::Approx(0.04).epsilon(1e-6));
}

TEST_CASE("even part of the drift decays quadratically") {
    TorusGrid g(1, 64);
    auto mu = CoefficientSpec::tabulated(asym_table(8), 8);
    KernelSpec a = sym_gauss();
    auto family = cutoff_perturbation_family(a);
    double prev = 0.0;
    std::vector<double> evens;
    for (double h : {1e-2, 5e-3}) {
        auto pp = std::make_shared<const PerturbationSpec>(family(Point{+h}));
        auto pm = std::make_shared<const PerturbationSpec>(family(Point{-h}));
        double bp = effective_drift_only(KernelSpec::composite_biased(a, pp), mu, g)[0];
        double bm = effective_drift_only(KernelSpec::composite_biased(a, pm), mu, g)[0];
        evens.push_back(std::abs(bp + bm));
        (void)prev;
    }
    double ratio = evens[0] / evens[1];
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
}

TEST_CASE("invariant weight expansion in ell") {
    TorusGrid g(1, 96);
    KernelSpec a = sym_gauss();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    auto family = cutoff_perturbation_family(a);
    PerturbationSpec c0 = PerturbationSpec::cutoff_family(a, Point{});
    auto phi0 = solve_phi0(a, c0, mu, g);

    std::vector<double> remainders;
    for (double ell : {2e-2, 1e-2}) {
        auto p = std::make_shared<const PerturbationSpec>(family(Point{ell}));
        KernelSpec biased = KernelSpec::composite_biased(a, p);
        PeriodizedKernel ph = periodize_weighted(biased, {}, g);
        auto ops = assemble_operators(ph, mu, g);
        auto [v0, res] = ground_state(ops, 1e-12, 50000);
        double m = 0.0;
        for (std::int64_t j = 0; j < g.num_nodes(); ++j)
            m = std::max(m, std::abs(v0[j] - 1.0 - ell * phi0[0][j]));
        remainders.push_back(m);
    }
    double ratio = remainders[0] / remainders[1];
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
}

TEST_CASE("finite differences reject oversized steps") {
    TorusGrid g(1, 32);
    KernelSpec a = sym_gauss();
    // direct odd perturbation without a protective cutoff: big steps break
    // nonnegativity of the composite kernel
    auto family = [&](const Point& ell) {
        return PerturbationSpec::odd_gaussian(1, 0.2, 1.0, ell);
    };
    CHECK_THROWS_AS(drift_finite_difference(a, family, CoefficientSpec::constant(1, 1.0), g,
                                            {3.0, 1.5}),
                    ConfigError);
}
