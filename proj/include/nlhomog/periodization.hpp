#ifndef NLHOMOG_PERIODIZATION_HPP
#define NLHOMOG_PERIODIZATION_HPP

#include <array>

#include "nlhomog/grid.hpp"
#include "nlhomog/kernels.hpp"

namespace nlhomog {

// Multi-index weight for the periodization, |alpha| <= 2. alpha = 0 gives the
// plain torus kernel; alpha = e_i and e_i + e_j give the first- and
// second-moment weighted variants used to pull integrals of z^alpha a(z)
// against periodic functions back to the torus.
using WeightIndex = std::array<int, kMaxDim>;

inline int weight_order(const WeightIndex& alpha) {
    int s = 0;
    for (int a : alpha) s += a;
    return s;
}

// Lattice periodization sum_k (eta + k)^alpha a(eta + k) sampled on the
// difference grid {j/N}. Truncated adaptively over max-norm shells of k.
struct PeriodizedKernel {
    TorusGrid grid{1, 4};  // placeholder until filled by periodize_weighted
    WeightIndex alpha{};
    Field values;        // flat over the difference grid
    int shells_used = 0;
    double tail_bound = 0.0;  // max-norm contribution of the last added shell
};

// Expands shells until the added shell contributes < tol in max norm.
// Throws NumericalError with the achieved tail bound if the hard shell cap
// is exceeded.
PeriodizedKernel periodize_weighted(const ScalarKernel& kernel, const WeightIndex& alpha,
                                    const TorusGrid& grid, double tol = 1e-13,
                                    int shell_cap = 64);

PeriodizedKernel periodize_weighted(const KernelSpec& spec, const WeightIndex& alpha,
                                    const TorusGrid& grid, double tol = 1e-13,
                                    int shell_cap = 64);

// The full set used by the cell pipeline: alpha = 0, all e_i, all e_i + e_j.
struct WeightedKernelSet {
    PeriodizedKernel plain;                       // alpha = 0
    std::array<PeriodizedKernel, kMaxDim> first;  // alpha = e_i, i < dim
    std::array<std::array<PeriodizedKernel, kMaxDim>, kMaxDim> second;  // e_i + e_j, j >= i mirrored
};

WeightedKernelSet periodize_all(const KernelSpec& spec, const TorusGrid& grid,
                                double tol = 1e-13);

}  // namespace nlhomog

#endif
