#include "nlhomog/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "nlhomog/dense_oracle.hpp"
#include "nlhomog/einstein.hpp"
#include "nlhomog/errors.hpp"
#include "nlhomog/evolution.hpp"
#include "nlhomog/parallel.hpp"

namespace nlhomog {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);  // 17 significant digits
    return buf;
}

json matrix_json(const DMat& m, int d) {
    json rows = json::array();
    for (int i = 0; i < d; ++i) {
        json row = json::array();
        for (int j = 0; j < d; ++j) row.push_back(m[i][j]);
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const Point& p, int d) {
    json v = json::array();
    for (int i = 0; i < d; ++i) v.push_back(p[i]);
    return v;
}

json cell_solution_json(const CellSolution& sol) {
    const int d = sol.grid.dim();
    json out;
    out["grid"] = {{"d", d}, {"n", sol.grid.points_per_dim()}};
    out["v0"] = sol.v0;
    out["b"] = vector_json(sol.b, d);
    json k1 = json::array();
    for (int i = 0; i < d; ++i) k1.push_back(sol.kappa1[i]);
    out["kappa1"] = k1;
    json k2 = json::array();
    for (int i = 0; i < d; ++i) {
        json row = json::array();
        for (int j = 0; j < d; ++j) row.push_back(sol.kappa2[i][j]);
        k2.push_back(row);
    }
    out["kappa2"] = k2;
    out["theta"] = matrix_json(sol.theta, d);
    out["I"] = matrix_json(sol.flux_I, d);
    out["residuals"] = {{"ground_state", sol.residuals.ground_state},
                        {"solvability", sol.residuals.solvability},
                        {"corrector1", sol.residuals.corrector1},
                        {"corrector2", sol.residuals.corrector2}};
    return out;
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

void write_manifest(const fs::path& dir, const RunConfig& cfg, const std::string& study,
                    int threads) {
    json m = cfg.resolved;
    m["study"] = study;
    m["version"] = kVersion;
    m["threads"] = threads;
    write_json(dir / "manifest.json", m);
}

void write_evolution_csv(const fs::path& path, const EvolutionReport& rep) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "t,l2_error,weighted_mass,weighted_energy\n";
    for (std::size_t s = 0; s < rep.times.size(); ++s)
        out << sci(rep.times[s]) << ',' << sci(rep.l2_error[s]) << ','
            << sci(rep.weighted_mass[s]) << ',' << sci(rep.weighted_energy[s]) << "\n";
}

int run_cell(const RunConfig& cfg, const fs::path& dir, int threads, bool verbose) {
    TorusGrid grid(cfg.dim, cfg.grid_n);
    CellSolution sol = solve_cell(*cfg.kernel, *cfg.mu, grid, cfg.tolerances, threads);
    if (verbose)
        std::cout << "cell: b[0] = " << sol.b[0] << ", theta[0][0] = " << sol.theta[0][0]
                  << ", ground_state residual = " << sol.residuals.ground_state << "\n";
    write_json(dir / "cell_solution.json", cell_solution_json(sol));
    return kExitOk;
}

int run_evolve(const RunConfig& cfg, const fs::path& dir, int threads, bool verbose) {
    TorusGrid cell_grid(cfg.dim, cfg.evolution.cells_resolution);
    CellSolution cell = solve_cell(*cfg.kernel, *cfg.mu, cell_grid, cfg.tolerances, threads);

    std::vector<EvolutionReport> reports(cfg.inv_epsilons.size());
    parallel_for(static_cast<std::int64_t>(cfg.inv_epsilons.size()), threads,
                 [&](std::int64_t lo, std::int64_t hi) {
                     for (std::int64_t r = lo; r < hi; ++r) {
                         EvolutionConfig ecfg = cfg.evolution;
                         ecfg.inv_epsilon = cfg.inv_epsilons[r];
                         RescaledGenerator gen(*cfg.kernel, *cfg.mu, ecfg);
                         reports[r] = moving_frame_error(gen, ecfg, cell);
                     }
                 });

    json summary;
    summary["cell"] = {{"b", vector_json(cell.b, cfg.dim)},
                       {"theta", matrix_json(cell.theta, cfg.dim)}};
    json runs = json::array();
    for (const auto& rep : reports) {
        write_evolution_csv(dir / ("evolve_eps" + std::to_string(rep.inv_epsilon) + ".csv"),
                            rep);
        runs.push_back({{"inv_epsilon", rep.inv_epsilon},
                        {"sup_error", rep.sup_error},
                        {"mass_drift_rel", rep.mass_drift_rel},
                        {"max_energy_increase_per_step", rep.max_energy_increase_per_step}});
        if (verbose)
            std::cout << "evolve: 1/eps = " << rep.inv_epsilon
                      << ", sup error = " << rep.sup_error << "\n";
    }
    summary["runs"] = runs;
    bool monotone = true;
    for (std::size_t r = 0; r + 1 < reports.size(); ++r)
        monotone = monotone && reports[r + 1].sup_error < reports[r].sup_error;
    summary["sup_error_monotone"] = monotone;
    write_json(dir / "evolve_summary.json", summary);
    return kExitOk;
}

int run_einstein(const RunConfig& cfg, const fs::path& dir, int threads, bool verbose) {
    TorusGrid grid(cfg.dim, cfg.grid_n);
    EinsteinReport rep =
        einstein_check(*cfg.kernel, *cfg.mu, grid, cfg.fd_steps, cfg.tolerances, threads);

    json out;
    out["theta_sym"] = matrix_json(rep.theta_sym, cfg.dim);
    out["I_sym"] = matrix_json(rep.I_sym, cfg.dim);
    out["B_lin"] = matrix_json(rep.B_lin, cfg.dim);
    out["B_fd"] = matrix_json(rep.B_fd, cfg.dim);
    out["max_dev_lin"] = rep.max_dev_lin;
    out["max_dev_fd"] = rep.max_dev_fd;
    out["max_dev_routes"] = rep.max_dev_routes;
    out["sym_identity_dev"] = rep.sym_identity_dev;
    out["fd_steps"] = rep.fd_steps;
    json phi0 = json::array();
    for (int i = 0; i < cfg.dim; ++i) phi0.push_back(rep.phi0[i]);
    out["phi0"] = phi0;
    write_json(dir / "einstein_report.json", out);

    std::ofstream csv(dir / "einstein_steps.csv");
    csv << "h";
    for (int i = 0; i < cfg.dim; ++i)
        for (int j = 0; j < cfg.dim; ++j) csv << ",B_fd_" << i << j;
    csv << "\n";
    for (std::size_t s = 0; s < rep.fd_per_step.size(); ++s) {
        csv << sci(rep.fd_steps[s]);
        for (int i = 0; i < cfg.dim; ++i)
            for (int j = 0; j < cfg.dim; ++j) csv << ',' << sci(rep.fd_per_step[s][i][j]);
        csv << "\n";
    }
    if (verbose)
        std::cout << "einstein: |B_fd - 2 theta_sym| = " << rep.max_dev_fd
                  << ", |B_lin - B_fd| = " << rep.max_dev_routes << "\n";
    return kExitOk;
}

int run_oracle(const RunConfig& cfg, const fs::path& dir, int threads, bool verbose) {
    TorusGrid grid(cfg.dim, cfg.grid_n);
    CellSolution sol = solve_cell(*cfg.kernel, *cfg.mu, grid, cfg.tolerances, threads);
    DenseCellSolution dense = oracle_cell_solution(*cfg.kernel, *cfg.mu, grid);
    OracleDiff diff = compare_with_oracle(sol, dense);

    json out;
    out["diff"] = {{"v0", diff.v0},
                   {"b", diff.b},
                   {"kappa1", diff.kappa1},
                   {"kappa2", diff.kappa2},
                   {"theta", diff.theta}};
    out["max"] = diff.max();
    out["tolerance"] = 1e-8;
    bool ok = diff.max() <= 1e-8;
    out["ok"] = ok;
    if (!ok) out["worst_field"] = diff.worst_field();
    write_json(dir / "oracle_report.json", out);
    if (verbose) std::cout << "oracle: max discrepancy = " << diff.max() << "\n";
    if (!ok) {
        std::cerr << "oracle mismatch: field '" << diff.worst_field() << "' differs by "
                  << diff.max() << " (tolerance 1e-8)\n";
        return kExitOracleMismatch;
    }
    return kExitOk;
}

}  // namespace

int run_study(const RunConfig& cfg, const std::string& out_dir, int threads, bool verbose) {
    fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
    fs::create_directories(dir);
    int resolved_threads = resolve_thread_count(threads);
    write_manifest(dir, cfg, cfg.study, resolved_threads);

    if (cfg.study == "cell") return run_cell(cfg, dir, resolved_threads, verbose);
    if (cfg.study == "evolve") return run_evolve(cfg, dir, resolved_threads, verbose);
    if (cfg.study == "einstein") return run_einstein(cfg, dir, resolved_threads, verbose);
    if (cfg.study == "oracle") return run_oracle(cfg, dir, resolved_threads, verbose);
    throw ConfigError("unknown study: '" + cfg.study + "'");
}

}  // namespace nlhomog
