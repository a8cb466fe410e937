#ifndef NLHOMOG_DENSE_ORACLE_HPP
#define NLHOMOG_DENSE_ORACLE_HPP

#include <array>

#include "nlhomog/cell.hpp"

namespace nlhomog {

// Independent dense verification path. Every matrix entry is a direct
// lattice sum of the analytic kernel (no shared periodization machinery);
// the invariant weight comes from an SVD null vector and the correctors from
// augmented least-squares solves. Small sizes only: d = 1, N <= 256.
struct DenseCellSolution {
    TorusGrid grid;
    Field v0;
    Point b{};
    std::array<Field, kMaxDim> kappa1;
    std::array<std::array<Field, kMaxDim>, kMaxDim> kappa2;
    DMat theta{};
};

DenseCellSolution oracle_cell_solution(const KernelSpec& kernel, const CoefficientSpec& mu,
                                       const TorusGrid& grid);

// Componentwise max-abs differences against the iterative pipeline. Both
// sides fix the zero-mean gauge, so fields are compared directly and a
// corrupted gauge is flagged rather than hidden.
struct OracleDiff {
    double v0 = 0.0;
    double b = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double theta = 0.0;
    double max() const;
    const char* worst_field() const;
};

OracleDiff compare_with_oracle(const CellSolution& pipeline, const DenseCellSolution& oracle);

}  // namespace nlhomog

#endif
