#include "nlhomog/evolution.hpp"

#include <cmath>

#include "nlhomog/errors.hpp"

namespace nlhomog {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;
}  // namespace

RescaledGenerator::RescaledGenerator(const KernelSpec& kernel, const CoefficientSpec& mu,
                                     const EvolutionConfig& cfg)
    : fine_(kernel.dim(), cfg.inv_epsilon * cfg.cells_resolution),
      cell_(kernel.dim(), cfg.cells_resolution),
      inv_eps_(cfg.inv_epsilon) {
    if (cfg.inv_epsilon < 1) throw ConfigError("RescaledGenerator: 1/epsilon must be >= 1");
    if (cfg.cells_resolution < 16)
        throw ConfigError("RescaledGenerator: need at least 16 points per cell");
    const double radius = kernel.decay_radius();
    if (radius * cfg.epsilon() > 0.5)
        throw ConfigError("RescaledGenerator: epsilon-scaled jumps exceed half the torus; "
                          "domain too small for this epsilon");

    a1_ = kernel_moments(kernel).mass;
    alpha2_ = mu.alpha2();

    const int d = fine_.dim();
    const int nc = cell_.points_per_dim();
    ScalarKernel a = evaluator(kernel);

    // fast-grid stencil z = r / n_cell covering the decay box
    const int reach = static_cast<int>(std::ceil(radius * nc));
    const double w0 = cell_.node_weight();
    std::vector<double> raw_weights;
    if (d == 1) {
        for (int r = -reach; r <= reach; ++r) {
            double w = w0 * a({static_cast<double>(r) / nc, 0.0});
            if (w == 0.0 && r != 0) continue;
            offsets_.push_back({r, 0});
            raw_weights.push_back(w);
        }
    } else {
        for (int r0 = -reach; r0 <= reach; ++r0)
            for (int r1 = -reach; r1 <= reach; ++r1) {
                double w = w0 * a({static_cast<double>(r0) / nc, static_cast<double>(r1) / nc});
                if (w == 0.0 && !(r0 == 0 && r1 == 0)) continue;
                offsets_.push_back({r0, r1});
                raw_weights.push_back(w);
            }
    }

    // fold mu into the stencil: target fast residue x stencil entry
    const std::int64_t ncells = cell_.num_nodes();
    const std::int64_t ns = static_cast<std::int64_t>(offsets_.size());
    weight_mu_.assign(ncells * ns, 0.0);
    for (std::int64_t c = 0; c < ncells; ++c) {
        auto cc = cell_.coords(c);
        Point x = cell_.node(c);
        for (std::int64_t s = 0; s < ns; ++s) {
            std::array<int, kMaxDim> tc{};
            for (int i = 0; i < d; ++i) {
                int v = (cc[i] - offsets_[s][i]) % nc;
                if (v < 0) v += nc;
                tc[i] = v;
            }
            weight_mu_[c * ns + s] = raw_weights[s] * mu.eval(x, cell_.node(cell_.flat(tc)));
        }
    }

    fast_of_fine_.resize(fine_.num_nodes());
    for (std::int64_t j = 0; j < fine_.num_nodes(); ++j) {
        auto fc = fine_.coords(j);
        std::array<int, kMaxDim> cc{};
        for (int i = 0; i < d; ++i) cc[i] = fc[i] % nc;
        fast_of_fine_[j] = cell_.flat(cc);
    }
}

Field RescaledGenerator::apply(const Field& u) const {
    const int d = fine_.dim();
    const int nf = fine_.points_per_dim();
    const std::int64_t n = fine_.num_nodes();
    const std::int64_t ns = static_cast<std::int64_t>(offsets_.size());
    const double scale = static_cast<double>(inv_eps_) * inv_eps_;  // eps^-2

    // differences inside the sum: constants are annihilated exactly
    Field out(n);
    if (d == 1) {
        for (std::int64_t j = 0; j < n; ++j) {
            const double* wrow = &weight_mu_[fast_of_fine_[j] * ns];
            const double uj = u[j];
            double acc = 0.0;
            for (std::int64_t s = 0; s < ns; ++s) {
                std::int64_t m = j - offsets_[s][0];
                if (m < 0) m += nf;
                else if (m >= nf) m -= nf;
                acc += wrow[s] * (u[m] - uj);
            }
            out[j] = scale * acc;
        }
        return out;
    }
    for (std::int64_t j = 0; j < n; ++j) {
        auto jc = fine_.coords(j);
        const double* wrow = &weight_mu_[fast_of_fine_[j] * ns];
        const double uj = u[j];
        double acc = 0.0;
        for (std::int64_t s = 0; s < ns; ++s) {
            int m0 = jc[0] - offsets_[s][0];
            int m1 = jc[1] - offsets_[s][1];
            m0 %= nf; if (m0 < 0) m0 += nf;
            m1 %= nf; if (m1 < 0) m1 += nf;
            acc += wrow[s] * (u[static_cast<std::int64_t>(m0) * nf + m1] - uj);
        }
        out[j] = scale * acc;
    }
    return out;
}

double RescaledGenerator::stable_dt(double dt_safety) const {
    double eps = 1.0 / inv_eps_;
    return dt_safety * eps * eps / (2.0 * a1_ * alpha2_);
}

Field RescaledGenerator::lift_cell_field(const Field& cell_field) const {
    if (static_cast<std::int64_t>(cell_field.size()) != cell_.num_nodes())
        throw InputError("lift_cell_field: field does not match the cell resolution");
    Field out(fine_.num_nodes());
    for (std::int64_t j = 0; j < fine_.num_nodes(); ++j)
        out[j] = cell_field[fast_of_fine_[j]];
    return out;
}

Field initial_datum(const EvolutionConfig& cfg, const TorusGrid& fine) {
    Field phi(fine.num_nodes());
    if (cfg.datum == InitialDatumKind::harmonic) {
        for (std::int64_t j = 0; j < fine.num_nodes(); ++j) {
            Point x = fine.node(j);
            double arg = 0.0;
            for (int i = 0; i < fine.dim(); ++i) arg += cfg.harmonic_k[i] * x[i];
            phi[j] = std::cos(kTwoPi * arg);
        }
        return phi;
    }
    // periodized bump centered at 1/2 per axis
    const double w = cfg.bump_width;
    if (!(w > 0.0)) throw ConfigError("initial_datum: bump width must be positive");
    const int images = static_cast<int>(std::ceil(8.0 * w)) + 1;
    for (std::int64_t j = 0; j < fine.num_nodes(); ++j) {
        Point x = fine.node(j);
        double v = 1.0;
        for (int i = 0; i < fine.dim(); ++i) {
            double s = 0.0;
            for (int k = -images; k <= images; ++k) {
                double t = x[i] - 0.5 + k;
                s += std::exp(-t * t / (2.0 * w * w));
            }
            v *= s;
        }
        phi[j] = v;
    }
    return phi;
}

EvolveResult evolve_u_eps(const RescaledGenerator& gen, const EvolutionConfig& cfg,
                          const Field& v0_cell) {
    const TorusGrid& fine = gen.fine_grid();
    const std::int64_t n = fine.num_nodes();
    Field v0_fine = gen.lift_cell_field(v0_cell);

    Field u = initial_datum(cfg, fine);
    Field abs_phi(n);
    for (std::int64_t j = 0; j < n; ++j) abs_phi[j] = std::abs(u[j]);
    const double mass_scale = std::max(fine.inner(abs_phi, v0_fine), 1e-300);

    auto mass_of = [&](const Field& f) { return fine.inner(f, v0_fine); };
    auto energy_of = [&](const Field& f) {
        double s = 0.0;
        for (std::int64_t j = 0; j < n; ++j) s += f[j] * f[j] * v0_fine[j];
        return s * fine.node_weight();
    };

    EvolveResult res;
    const int S = std::max(2, cfg.snapshots);
    const double dt_max = gen.stable_dt(cfg.dt_safety);
    const double mass0 = mass_of(u);

    res.times.push_back(0.0);
    res.states.push_back(u);
    res.weighted_mass.push_back(mass0);
    res.weighted_energy.push_back(energy_of(u));

    Field k1, k2, k3, k4, tmp(n);
    double energy_prev = res.weighted_energy.back();
    for (int s = 1; s < S; ++s) {
        double t_target = cfg.horizon * s / (S - 1);
        double t_now = cfg.horizon * (s - 1) / (S - 1);
        double interval = t_target - t_now;
        int steps = std::max(1, static_cast<int>(std::ceil(interval / dt_max)));
        double dt = interval / steps;
        for (int q = 0; q < steps; ++q) {
            k1 = gen.apply(u);
            for (std::int64_t j = 0; j < n; ++j) tmp[j] = u[j] + 0.5 * dt * k1[j];
            k2 = gen.apply(tmp);
            for (std::int64_t j = 0; j < n; ++j) tmp[j] = u[j] + 0.5 * dt * k2[j];
            k3 = gen.apply(tmp);
            for (std::int64_t j = 0; j < n; ++j) tmp[j] = u[j] + dt * k3[j];
            k4 = gen.apply(tmp);
            for (std::int64_t j = 0; j < n; ++j)
                u[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

            double e = energy_of(u);
            if (!std::isfinite(e))
                throw NumericalError("evolve_u_eps: state blew up; decrease dt_safety", e);
            res.max_energy_increase_per_step =
                std::max(res.max_energy_increase_per_step, e - energy_prev);
            energy_prev = e;
        }
        res.times.push_back(t_target);
        res.states.push_back(u);
        res.weighted_mass.push_back(mass_of(u));
        res.weighted_energy.push_back(energy_prev);
        res.mass_drift_rel = std::max(res.mass_drift_rel,
                                      std::abs(res.weighted_mass.back() - mass0) / mass_scale);
    }
    return res;
}

namespace {

// heat multiplier and optional frame phase applied to the modal coefficients
CField limit_modes(const TorusGrid& grid, const Field& phi, const DMat& theta, double t,
                   const Point* frame_shift) {
    CField modes = to_complex(phi);
    dft_forward(grid, modes);
    const int n = grid.points_per_dim();
    for (std::int64_t idx = 0; idx < grid.num_nodes(); ++idx) {
        auto c = grid.coords(idx);
        double quad_form = 0.0;
        double phase = 0.0;
        for (int i = 0; i < grid.dim(); ++i) {
            double ki = signed_freq(c[i], n);
            for (int j = 0; j < grid.dim(); ++j) {
                double kj = signed_freq(c[j], n);
                quad_form += ki * 0.5 * (theta[i][j] + theta[j][i]) * kj;
            }
            if (frame_shift) phase -= kTwoPi * ki * (*frame_shift)[i];
        }
        double decay = std::exp(-4.0 * kPi * kPi * t * quad_form);
        modes[idx] *= decay * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    return modes;
}

}  // namespace

Field exact_u0(const TorusGrid& grid, const Field& phi, const DMat& theta, double t) {
    CField modes = limit_modes(grid, phi, theta, t, nullptr);
    dft_inverse(grid, modes);
    return real_part(modes);
}

Field exact_u0_moving(const TorusGrid& grid, const Field& phi, const DMat& theta,
                      const Point& b, double epsilon, double t) {
    Point shift{};
    for (int i = 0; i < grid.dim(); ++i) shift[i] = b[i] * t / epsilon;
    CField modes = limit_modes(grid, phi, theta, t, &shift);
    dft_inverse(grid, modes);
    return real_part(modes);
}

EvolutionReport moving_frame_error(const RescaledGenerator& gen, const EvolutionConfig& cfg,
                                   const CellSolution& cell) {
    if (!(cell.grid == gen.cell_grid()))
        throw InputError("moving_frame_error: cell solution resolution must match "
                         "cells_resolution");
    const TorusGrid& fine = gen.fine_grid();
    EvolveResult run = evolve_u_eps(gen, cfg, cell.v0);
    Field phi = initial_datum(cfg, fine);

    EvolutionReport rep;
    rep.inv_epsilon = gen.inv_epsilon();
    rep.times = run.times;
    rep.weighted_mass = run.weighted_mass;
    rep.weighted_energy = run.weighted_energy;
    rep.mass_drift_rel = run.mass_drift_rel;
    rep.max_energy_increase_per_step = run.max_energy_increase_per_step;

    const double eps = cfg.epsilon();
    for (std::size_t s = 0; s < run.times.size(); ++s) {
        double t = run.times[s];
        Point shift{};
        for (int i = 0; i < fine.dim(); ++i) shift[i] = cell.b[i] * t / eps;
        Field moved = spectral_shift(fine, run.states[s], shift);
        Field u0 = exact_u0(fine, phi, cell.theta, t);
        double acc = 0.0;
        for (std::int64_t j = 0; j < fine.num_nodes(); ++j) {
            double d = moved[j] - u0[j];
            acc += d * d;
        }
        double err = std::sqrt(acc * fine.node_weight());
        rep.l2_error.push_back(err);
        rep.sup_error = std::max(rep.sup_error, err);
    }
    return rep;
}

Field build_ansatz(const RescaledGenerator& gen, const EvolutionConfig& cfg,
                   const CellSolution& cell, const Field& phi, double t) {
    const TorusGrid& fine = gen.fine_grid();
    const int d = fine.dim();
    const int n = fine.points_per_dim();
    const double eps = cfg.epsilon();

    // static-frame limit solution: shift back by b t / eps
    Point back{};
    for (int i = 0; i < d; ++i) back[i] = -cell.b[i] * t / eps;
    CField base = limit_modes(fine, phi, cell.theta, t, nullptr);
    for (std::int64_t idx = 0; idx < fine.num_nodes(); ++idx) {
        auto c = fine.coords(idx);
        double phase = 0.0;
        for (int i = 0; i < d; ++i) phase += kTwoPi * signed_freq(c[i], n) * back[i];
        base[idx] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }

    auto derivative = [&](const CField& modes, int axis) {
        CField out = modes;
        for (std::int64_t idx = 0; idx < fine.num_nodes(); ++idx) {
            auto c = fine.coords(idx);
            double k = signed_freq(c[axis], n);
            out[idx] *= std::complex<double>(0.0, kTwoPi * k);
        }
        return out;
    };

    CField u0m = base;
    dft_inverse(fine, u0m);
    Field w = real_part(u0m);

    for (int i = 0; i < d; ++i) {
        CField gi = derivative(base, i);
        dft_inverse(fine, gi);
        Field grad_i = real_part(gi);
        Field k1 = gen.lift_cell_field(cell.kappa1[i]);
        for (std::int64_t j = 0; j < fine.num_nodes(); ++j)
            w[j] += eps * k1[j] * grad_i[j];
    }
    for (int i = 0; i < d; ++i)
        for (int j2 = 0; j2 < d; ++j2) {
            CField gij = derivative(derivative(base, i), j2);
            dft_inverse(fine, gij);
            Field hess = real_part(gij);
            Field k2 = gen.lift_cell_field(cell.kappa2[i][j2]);
            for (std::int64_t j = 0; j < fine.num_nodes(); ++j)
                w[j] += eps * eps * k2[j] * hess[j];
        }
    return w;
}

}  // namespace nlhomog
