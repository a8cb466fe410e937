#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "nlhomog/cell.hpp"
#include "nlhomog/dense_oracle.hpp"
#include "nlhomog/errors.hpp"
#include "nlhomog/perturbation.hpp"

using namespace nlhomog;

namespace {

KernelSpec shifted() { return KernelSpec::shifted_gaussian(1, 0.2, {0.3}); }

KernelSpec biased_composite(double ell) {
    KernelSpec g = KernelSpec::gaussian(1, 0.2);
    auto pert = std::make_shared<const PerturbationSpec>(
        PerturbationSpec::cutoff_family(g, Point{ell}));
    return KernelSpec::composite_biased(g, pert);
}

double field_gap(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("ground state is the constant for constant mu") {
    TorusGrid g(1, 64);
    PeriodizedKernel ph = periodize_weighted(shifted(), {}, g);
    auto ops = assemble_operators(ph, CoefficientSpec::constant(1, 1.0), g);
    auto [v0, res] = ground_state(ops, 1e-12, 50000);
    CHECK(res <= 1e-12);
    for (double v : v0) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ground state is the constant for even kernel and symmetric mu") {
    TorusGrid g(1, 64);
    PeriodizedKernel ph = periodize_weighted(KernelSpec::gaussian(1, 0.2), {}, g);
    auto ops = assemble_operators(ph, CoefficientSpec::trig_product(1, 0.5), g);
    auto [v0, res] = ground_state(ops, 1e-12, 50000);
    CHECK(res <= 1e-12);
    double gap = 0.0;
    for (double v : v0) gap = std::max(gap, std::abs(v - 1.0));
    CHECK(gap <= 1e-8);
}

TEST_CASE("ground state matches the dense null-vector oracle") {
    TorusGrid g(1, 128);
    KernelSpec k = shifted();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    PeriodizedKernel ph = periodize_weighted(k, {}, g);
    auto ops = assemble_operators(ph, mu, g);
    auto [v0, res] = ground_state(ops, 1e-12, 50000);
    CHECK(res <= 1e-12);
    for (double v : v0) CHECK(v > 0.0);
    CHECK(g.quadrature(v0) == doctest::Approx(1.0).epsilon(1e-14));

    DenseCellSolution oracle = oracle_cell_solution(k, mu, g);
    CHECK(field_gap(v0, oracle.v0) <= 1e-8);
}

TEST_CASE("ground state failure modes carry the residual") {
    TorusGrid g(1, 32);
    PeriodizedKernel ph = periodize_weighted(shifted(), {}, g);
    auto ops = assemble_operators(ph, CoefficientSpec::trig_product(1, 0.5), g);
    CHECK_THROWS_AS(ground_state(ops, 1e-12, 3), NumericalError);
    try {
        ground_state(ops, 1e-12, 3);
    } catch (const NumericalError& e) {
        CHECK(e.achieved_residual > 0.0);
        CHECK(std::isfinite(e.achieved_residual));
    }
}

TEST_CASE("drift closed form for constant coefficients") {
    TorusGrid g(1, 64);
    auto mu = CoefficientSpec::constant(1, 1.0);
    WeightedKernelSet ks = periodize_all(shifted(), g);
    Field ones(g.num_nodes(), 1.0);
    DriftRhs rhs = drift_and_rhs(g, ks, mu, ones);
    CHECK(rhs.b[0] == doctest::Approx(0.3).epsilon(1e-10));
    for (std::int64_t j = 0; j < g.num_nodes(); ++j) {
        CHECK(rhs.f[0][j] == doctest::Approx(0.3).epsilon(1e-10));
        CHECK(std::abs(rhs.h[0][j]) <= 1e-10);
    }
    CHECK(rhs.solvability <= 1e-10);
}

TEST_CASE("drift vanishes in the symmetric case") {
    TorusGrid g(1, 64);
    CellSolution sol = solve_cell(KernelSpec::gaussian(1, 0.2),
                                  CoefficientSpec::trig_product(1, 0.5), g);
    CHECK(std::abs(sol.b[0]) <= 1e-8);
    double gap = 0.0;
    for (double v : sol.v0) gap = std::max(gap, std::abs(v - 1.0));
    CHECK(gap <= 1e-8);
}

TEST_CASE("correctors vanish for constant mu and the solver meets its contract") {
    TorusGrid g(1, 64);
    CellSolution sol = solve_cell(shifted(), CoefficientSpec::constant(1, 1.0), g);
    for (std::int64_t j = 0; j < g.num_nodes(); ++j) {
        CHECK(std::abs(sol.kappa1[0][j]) <= 1e-10);
        CHECK(std::abs(sol.kappa2[0][0][j]) <= 1e-10);
    }
    CHECK(sol.theta[0][0] == doctest::Approx(0.065).epsilon(1e-8));
    CHECK(sol.flux_I[0][0] == doctest::Approx(0.13).epsilon(1e-8));
    CHECK(sol.residuals.corrector1 <= 1e-10);
    CHECK(sol.residuals.corrector2 <= 1e-10);
}

TEST_CASE("theta closed forms for constant coefficients") {
    TorusGrid g(1, 64);
    CellSolution even = solve_cell(KernelSpec::gaussian(1, 0.2),
                                   CoefficientSpec::constant(1, 1.0), g);
    CHECK(even.theta[0][0] == doctest::Approx(0.02).epsilon(1e-9));

    // variable mu pulls the effective diffusivity below the flat average
    CellSolution trig = solve_cell(KernelSpec::gaussian(1, 0.2),
                                   CoefficientSpec::trig_product(1, 0.5), g);
    CHECK(trig.theta[0][0] < 0.02);
    CHECK(trig.theta[0][0] > 0.0);
}

TEST_CASE("full pipeline agrees with the dense oracle on the biased case") {
    TorusGrid g(1, 128);
    KernelSpec k = shifted();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    CellSolution sol = solve_cell(k, mu, g);
    DenseCellSolution oracle = oracle_cell_solution(k, mu, g);
    OracleDiff diff = compare_with_oracle(sol, oracle);
    CHECK(diff.v0 <= 1e-8);
    CHECK(diff.b <= 1e-8);
    CHECK(diff.kappa1 <= 1e-8);
    CHECK(diff.kappa2 <= 1e-8);
    CHECK(diff.theta <= 1e-8);
}

TEST_CASE("oracle agreement for a composite biased kernel") {
    TorusGrid g(1, 96);
    KernelSpec k = biased_composite(0.35);
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    CellSolution sol = solve_cell(k, mu, g);
    DenseCellSolution oracle = oracle_cell_solution(k, mu, g);
    CHECK(compare_with_oracle(sol, oracle).max() <= 1e-8);
    CHECK(sol.b[0] > 1e-3);  // the bias shows up as real drift
}

TEST_CASE("flux identity and positive definiteness") {
    TorusGrid g(1, 96);
    CellSolution sol = solve_cell(shifted(), CoefficientSpec::trig_product(1, 0.5), g);
    double scale = std::abs(sol.flux_I[0][0]);
    CHECK(std::abs(sol.flux_I[0][0] - 2.0 * sol.theta[0][0]) <= 1e-8 * scale);
    CHECK(sol.theta[0][0] > 0.0);

    // gauge: both correctors integrate to zero
    CHECK(std::abs(g.quadrature(sol.kappa1[0])) <= 1e-13);
    CHECK(std::abs(g.quadrature(sol.kappa2[0][0])) <= 1e-13);
}

TEST_CASE("flux identity in two dimensions") {
    TorusGrid g(2, 16);
    DMat cov{};
    cov[0][0] = 0.05;
    cov[0][1] = cov[1][0] = 0.012;
    cov[1][1] = 0.03;
    KernelSpec an = KernelSpec::anisotropic_gaussian(2, cov);
    // perturbation must decay faster than the narrowest base direction
    auto pert = std::make_shared<const PerturbationSpec>(
        PerturbationSpec::odd_gaussian(2, 0.12, 0.3, Point{0.3, -0.2}));
    KernelSpec k = KernelSpec::composite_biased(an, pert);
    auto mu = CoefficientSpec::trig_product(2, 0.4);
    CellSolution sol = solve_cell(k, mu, g);

    double norm = 0.0, dev = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            norm = std::max(norm, std::abs(sol.flux_I[i][j]));
            dev = std::max(dev, std::abs(sol.flux_I[i][j] - sol.theta[i][j] - sol.theta[j][i]));
        }
    CHECK(dev <= 1e-8 * norm);
    // I is symmetric without being mirrored in code
    CHECK(std::abs(sol.flux_I[0][1] - sol.flux_I[1][0]) <= 1e-12 * norm);

    // positive definiteness of the symmetric part through random directions
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        double r0 = u(rng), r1 = u(rng);
        double nrm = std::sqrt(r0 * r0 + r1 * r1);
        if (nrm < 1e-6) continue;
        r0 /= nrm;
        r1 /= nrm;
        double q = r0 * sol.flux_I[0][0] * r0 + 2 * r0 * sol.flux_I[0][1] * r1 +
                   r1 * sol.flux_I[1][1] * r1;
        CHECK(q > 0.0);
    }
}

TEST_CASE("weighted dissipativity of the cell operator") {
    TorusGrid g(1, 64);
    KernelSpec k = shifted();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    PeriodizedKernel ph = periodize_weighted(k, {}, g);
    auto ops = assemble_operators(ph, mu, g);
    auto [v0, res] = ground_state(ops, 1e-12, 50000);

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double eps_tol = 10.0 * std::max(res, 1e-16);
    for (int t = 0; t < 100; ++t) {
        Field v(g.num_nodes());
        for (auto& x : v) x = u(rng);
        Field av = ops.apply_A(v);
        double form = 0.0;
        for (std::int64_t j = 0; j < g.num_nodes(); ++j) form += v[j] * v0[j] * av[j];
        form *= g.node_weight();
        CHECK(form <= eps_tol * g.inner(v, v));
    }
}

TEST_CASE("theta is invariant under the corrector gauge") {
    TorusGrid g(1, 64);
    KernelSpec k = shifted();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    WeightedKernelSet ks = periodize_all(k, g);
    auto ops = assemble_operators(ks.plain, mu, g);
    auto [v0, res] = ground_state(ops, 1e-12, 50000);
    DriftRhs rhs = drift_and_rhs(g, ks, mu, v0);
    CellTolerances tols;
    auto [kappa1, r1] = solve_corrector1(ops, rhs, v0, tols);

    EffectiveMatrix zero_mean = effective_matrix(kappa1, rhs.b, v0, ks, mu, g);
    // re-gauge: kappa1(0) = 0 instead of zero mean
    std::array<Field, kMaxDim> pinned = kappa1;
    double c = pinned[0][0];
    for (double& x : pinned[0]) x -= c;
    EffectiveMatrix pinned_eff = effective_matrix(pinned, rhs.b, v0, ks, mu, g);
    CHECK(zero_mean.theta[0][0] == doctest::Approx(pinned_eff.theta[0][0]).epsilon(1e-8));

    // the flux matrix only sees corrector differences, same invariance
    DMat I0 = flux_matrix_I(kappa1, v0, ks, mu, g);
    DMat I1 = flux_matrix_I(pinned, v0, ks, mu, g);
    CHECK(I0[0][0] == doctest::Approx(I1[0][0]).epsilon(1e-10));
}

TEST_CASE("scaling covariance in mu") {
    TorusGrid g(1, 64);
    KernelSpec k = shifted();
    CellSolution base = solve_cell(k, CoefficientSpec::trig_product(1, 0.5, 1.0), g);
    CellSolution twice = solve_cell(k, CoefficientSpec::trig_product(1, 0.5, 2.0), g);
    CHECK(twice.b[0] == doctest::Approx(2.0 * base.b[0]).epsilon(1e-8));
    CHECK(twice.theta[0][0] == doctest::Approx(2.0 * base.theta[0][0]).epsilon(1e-8));
    CHECK(field_gap(base.v0, twice.v0) <= 1e-8);
    CHECK(field_gap(base.kappa1[0], twice.kappa1[0]) <= 1e-8);
}

TEST_CASE("grid convergence of drift and theta") {
    // interpolated mu keeps the convergence visible above roundoff
    std::vector<double> tab(8 * 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            double x = 2 * M_PI * i / 8, y = 2 * M_PI * j / 8;
            tab[i * 8 + j] = 1.0 + 0.3 * std::sin(x + 0.7) * std::sin(y + 0.7) +
                             0.1 * (std::cos(x) + std::cos(y));
        }
    auto mu = CoefficientSpec::tabulated(tab, 8);
    std::vector<double> bs, th;
    for (int N : {32, 64, 128}) {
        CellSolution s = solve_cell(shifted(), mu, TorusGrid(1, N));
        bs.push_back(s.b[0]);
        th.push_back(s.theta[0][0]);
    }
    CHECK(std::abs(bs[1] - bs[0]) > std::abs(bs[2] - bs[1]));
    CHECK(std::abs(th[1] - th[0]) > std::abs(th[2] - th[1]));
}

TEST_CASE("solvability precondition is enforced") {
    TorusGrid g(1, 32);
    KernelSpec k = shifted();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    WeightedKernelSet ks = periodize_all(k, g);
    auto ops = assemble_operators(ks.plain, mu, g);
    auto [v0, res] = ground_state(ops, 1e-12, 50000);
    DriftRhs rhs = drift_and_rhs(g, ks, mu, v0);
    rhs.h[0][0] += 0.1;  // breaks <h, v0> = 0
    CellTolerances tols;
    CHECK_THROWS_AS(solve_corrector1(ops, rhs, v0, tols), InputError);
}

TEST_CASE("a corrupted corrector gauge is flagged but does not move theta") {
    TorusGrid g(1, 64);
    KernelSpec k = shifted();
    auto mu = CoefficientSpec::trig_product(1, 0.5);
    CellSolution sol = solve_cell(k, mu, g);
    DenseCellSolution oracle = oracle_cell_solution(k, mu, g);

    CellSolution corrupted = sol;
    const double offset = 0.37;
    for (double& x : corrupted.kappa1[0]) x += offset;
    WeightedKernelSet ks = periodize_all(k, g);
    corrupted.theta =
        effective_matrix(corrupted.kappa1, corrupted.b, corrupted.v0, ks, mu, g).theta;

    OracleDiff diff = compare_with_oracle(corrupted, oracle);
    CHECK(diff.theta <= 1e-8);                              // gauge invariance of theta
    CHECK(diff.kappa1 == doctest::Approx(offset).epsilon(1e-6));  // the field diff flags it
    CHECK(std::string(diff.worst_field()) == "kappa1");
}

TEST_CASE("oracle respects its size limits") {
    CHECK_THROWS_AS(
        oracle_cell_solution(shifted(), CoefficientSpec::constant(1, 1.0), TorusGrid(1, 512)),
        CapabilityError);
    CHECK_THROWS_AS(oracle_cell_solution(KernelSpec::gaussian(2, 0.2),
                                         CoefficientSpec::constant(2, 1.0), TorusGrid(2, 16)),
                    CapabilityError);
}
