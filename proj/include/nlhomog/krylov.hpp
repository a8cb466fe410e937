#ifndef NLHOMOG_KRYLOV_HPP
#define NLHOMOG_KRYLOV_HPP

#include <functional>

#include "nlhomog/grid.hpp"

namespace nlhomog {

struct KrylovOptions {
    double rel_tol = 1e-14;
    int restart = 60;
    int max_iterations = 5000;
};

struct KrylovResult {
    Field x;
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

// Restarted GMRES in the grid quadrature inner product for a nonsingular
// apply. Stagnation is reported through `converged`, never by exception;
// callers enforce their own contract on the true residual.
KrylovResult gmres(const std::function<Field(const Field&)>& apply, const Field& rhs,
                   const TorusGrid& grid, const KrylovOptions& opts = {});

}  // namespace nlhomog

#endif
