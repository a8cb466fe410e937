#ifndef NLHOMOG_EINSTEIN_HPP
#define NLHOMOG_EINSTEIN_HPP

#include <functional>
#include <vector>

#include "nlhomog/cell.hpp"
#include "nlhomog/perturbation.hpp"

namespace nlhomog {

// A perturbation family parameterized by the bias vector; the cutoff family
// rebuilds its components for each ell (the cutoff argument scales with |ell|).
using PerturbationFamily = std::function<PerturbationSpec(const Point& ell)>;

PerturbationFamily cutoff_perturbation_family(const KernelSpec& a_sym);

// Linear response of the invariant weight: solves
// A_sym phi0^i = 2 * (c^i-weighted mu sum) in the zero-mean gauge.
// Requires a symmetric mu; solvability of the right-hand side is a
// consequence of the antisymmetry of c and is checked, not assumed.
std::array<Field, kMaxDim> solve_phi0(const KernelSpec& a_sym, const PerturbationSpec& c,
                                      const CoefficientSpec& mu, const TorusGrid& grid,
                                      const CellTolerances& tols = {}, int threads = 1);

// First-order drift response B = d b / d ell at ell = 0 from the
// linearization: B^{ij} = integral z^i c^j mu + integral z^i a_sym mu phi0^j.
DMat drift_linearization(const KernelSpec& a_sym, const PerturbationSpec& c,
                         const CoefficientSpec& mu, const TorusGrid& grid,
                         const std::array<Field, kMaxDim>& phi0,
                         const CellTolerances& tols = {}, int threads = 1);

struct FdJacobian {
    DMat jacobian{};                 // Richardson extrapolation of the two finest steps
    std::vector<double> steps;       // descending
    std::vector<DMat> per_step;      // central difference at each step
    std::vector<double> step_decay;  // max|D(h_k) - D(h_{k+1})| between neighbours
};

// Runs the full nonlinear drift pipeline at ell = +/- h e_j for every axis
// and step; central differences plus one Richardson level.
FdJacobian drift_finite_difference(const KernelSpec& a_sym, const PerturbationFamily& family,
                                   const CoefficientSpec& mu, const TorusGrid& grid,
                                   const std::vector<double>& h_steps,
                                   const CellTolerances& tols = {}, int threads = 1);

struct EinsteinReport {
    std::array<Field, kMaxDim> phi0;
    DMat B_lin{};
    DMat B_fd{};
    DMat theta_sym{};
    DMat I_sym{};
    double max_dev_lin = 0.0;      // max |B_lin - 2 theta_sym|
    double max_dev_fd = 0.0;       // max |B_fd  - 2 theta_sym|
    double max_dev_routes = 0.0;   // max |B_lin - B_fd|
    double sym_identity_dev = 0.0; // max |(2 theta_sym)_sym - I_sym|
    std::vector<double> fd_steps;
    std::vector<DMat> fd_per_step;
    std::vector<double> fd_step_decay;
};

// Assembles theta_sym from the unperturbed cell problem and checks both
// Jacobian routes for the cutoff family against 2 theta_sym.
EinsteinReport einstein_check(const KernelSpec& a_sym, const CoefficientSpec& mu,
                              const TorusGrid& grid,
                              const std::vector<double>& fd_steps = {1e-2, 5e-3, 2.5e-3},
                              const CellTolerances& tols = {}, int threads = 1);

}  // namespace nlhomog

#endif
