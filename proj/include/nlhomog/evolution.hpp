#ifndef NLHOMOG_EVOLUTION_HPP
#define NLHOMOG_EVOLUTION_HPP

#include <vector>

#include "nlhomog/cell.hpp"
#include "nlhomog/coefficients.hpp"
#include "nlhomog/dft.hpp"
#include "nlhomog/grid.hpp"
#include "nlhomog/kernels.hpp"

namespace nlhomog {

enum class InitialDatumKind { harmonic, gaussian_bump };

struct EvolutionConfig {
    int inv_epsilon = 8;       // 1/epsilon, a positive integer so the medium
                               // composed with x/epsilon stays 1-periodic
    double horizon = 0.25;     // T
    int cells_resolution = 32; // fast-grid points per periodicity cell
    InitialDatumKind datum = InitialDatumKind::harmonic;
    std::array<int, kMaxDim> harmonic_k{1, 0};
    double bump_width = 0.1;
    double dt_safety = 0.8;    // fraction of the explicit stability bound
    int snapshots = 33;

    double epsilon() const { return 1.0 / inv_epsilon; }
};

// The rescaled jump generator on the fine slow-torus grid, matrix-free with
// circular-shift structure. The fast quadrature nodes are z = r/n_cell out
// to the decay radius, so every jump lands exactly on a fine-grid node and
// the cell-problem identities transfer to the time stepper.
class RescaledGenerator {
public:
    RescaledGenerator(const KernelSpec& kernel, const CoefficientSpec& mu,
                      const EvolutionConfig& cfg);

    const TorusGrid& fine_grid() const { return fine_; }
    const TorusGrid& cell_grid() const { return cell_; }
    int inv_epsilon() const { return inv_eps_; }
    double kernel_mass() const { return a1_; }

    Field apply(const Field& u) const;  // L^eps u

    // dt_safety * eps^2 / (2 a1 alpha2): the generator norm is bounded by
    // 2 a1 alpha2 / eps^2, so explicit stepping is stable below this.
    double stable_dt(double dt_safety) const;

    // Lift a cell-grid field to the fine grid by fast-variable sampling.
    Field lift_cell_field(const Field& cell_field) const;

private:
    TorusGrid fine_;
    TorusGrid cell_;
    int inv_eps_;
    double a1_;
    double alpha2_;
    // stencil offsets r (flattened per-dim) and tables indexed by the fast
    // residue of the target node
    std::vector<std::array<int, kMaxDim>> offsets_;
    std::vector<double> weight_mu_;  // [fast_residue * n_stencil + s]
    std::vector<std::int64_t> fast_of_fine_;
};

Field initial_datum(const EvolutionConfig& cfg, const TorusGrid& fine);

struct EvolveResult {
    std::vector<double> times;
    std::vector<Field> states;
    std::vector<double> weighted_mass;
    std::vector<double> weighted_energy;
    double mass_drift_rel = 0.0;             // against the |phi| weighted scale
    double max_energy_increase_per_step = 0.0;
};

// Classical 4th-order explicit stepping with snapshot landing; records the
// v0-weighted mass and energy (the energy must not increase beyond roundoff).
EvolveResult evolve_u_eps(const RescaledGenerator& gen, const EvolutionConfig& cfg,
                          const Field& v0_cell);

// Spectral solution of the constant-coefficient limit problem: mode k decays
// by exp(-4 pi^2 t k.Theta_sym k); the moving frame adds the phase
// exp(-2 pi i k.b t / epsilon).
Field exact_u0(const TorusGrid& grid, const Field& phi, const DMat& theta, double t);
Field exact_u0_moving(const TorusGrid& grid, const Field& phi, const DMat& theta,
                      const Point& b, double epsilon, double t);

struct EvolutionReport {
    int inv_epsilon = 0;
    std::vector<double> times;
    std::vector<double> l2_error;
    std::vector<double> weighted_mass;
    std::vector<double> weighted_energy;
    double sup_error = 0.0;
    double mass_drift_rel = 0.0;
    double max_energy_increase_per_step = 0.0;
};

// Moving-frame comparison: u^eps shifted by b t / eps against the exact
// limit solution, in the fine-grid L^2 norm, sup over the snapshot times.
EvolutionReport moving_frame_error(const RescaledGenerator& gen, const EvolutionConfig& cfg,
                                   const CellSolution& cell);

// Two-scale expansion u0 + eps kappa1 . grad u0 + eps^2 kappa2 . grad grad u0
// evaluated in the static frame (everything shifted back by b t / eps).
Field build_ansatz(const RescaledGenerator& gen, const EvolutionConfig& cfg,
                   const CellSolution& cell, const Field& phi, double t);

}  // namespace nlhomog

#endif
