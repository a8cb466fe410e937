#ifndef NLHOMOG_GRID_HPP
#define NLHOMOG_GRID_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nlhomog/errors.hpp"

namespace nlhomog {

// Desk-scale limit: everything in this library runs in one or two dimensions.
inline constexpr int kMaxDim = 2;

// Point in R^d. Coordinates beyond the active dimension are kept at zero.
using Point = std::array<double, kMaxDim>;

// Grid field, flattened row-major over the node lattice.
using Field = std::vector<double>;

inline double reduce_mod1(double x) {
    double r = x - static_cast<std::int64_t>(x);
    return r < 0.0 ? r + 1.0 : r;
}

// Uniform grid on the unit torus: nodes j/N per dimension covering [0,1)
// exactly once, rectangle-rule weight h^d per node. Rectangle rule on
// uniform periodic nodes is spectrally accurate for smooth integrands and
// exact for harmonics below the Nyquist limit.
class TorusGrid {
public:
    TorusGrid(int dim, int points_per_dim) : dim_(dim), n_(points_per_dim) {
        if (dim < 1 || dim > kMaxDim)
            throw ConfigError("TorusGrid: dim must be 1 or " + std::to_string(kMaxDim));
        if (n_ < 4) throw ConfigError("TorusGrid: need at least 4 points per dimension");
        nodes_ = 1;
        for (int i = 0; i < dim_; ++i) nodes_ *= n_;
        weight_ = 1.0;
        for (int i = 0; i < dim_; ++i) weight_ /= static_cast<double>(n_);
    }

    int dim() const { return dim_; }
    int points_per_dim() const { return n_; }
    double spacing() const { return 1.0 / n_; }
    std::int64_t num_nodes() const { return nodes_; }
    double node_weight() const { return weight_; }  // h^d

    // Flat index <-> lattice coordinates (row-major, axis 0 slowest).
    std::array<int, kMaxDim> coords(std::int64_t flat) const {
        std::array<int, kMaxDim> c{};
        for (int i = dim_ - 1; i >= 0; --i) {
            c[i] = static_cast<int>(flat % n_);
            flat /= n_;
        }
        return c;
    }

    std::int64_t flat(const std::array<int, kMaxDim>& c) const {
        std::int64_t f = 0;
        for (int i = 0; i < dim_; ++i) f = f * n_ + c[i];
        return f;
    }

    Point node(std::int64_t flat_index) const {
        auto c = coords(flat_index);
        Point p{};
        for (int i = 0; i < dim_; ++i) p[i] = static_cast<double>(c[i]) / n_;
        return p;
    }

    // Flat index of the lattice difference (xi_j - xi_m) mod 1.
    std::int64_t diff_index(std::int64_t j, std::int64_t m) const {
        auto cj = coords(j);
        auto cm = coords(m);
        std::int64_t f = 0;
        for (int i = 0; i < dim_; ++i) {
            int d = cj[i] - cm[i];
            if (d < 0) d += n_;
            f = f * n_ + d;
        }
        return f;
    }

    // Rectangle rule, fixed left-to-right summation order (reductions that
    // feed reports must be reproducible bit-for-bit).
    double quadrature(std::span<const double> field) const {
        double s = 0.0;
        for (double v : field) s += v;
        return s * weight_;
    }

    double inner(std::span<const double> a, std::span<const double> b) const {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s * weight_;
    }

    bool operator==(const TorusGrid& o) const { return dim_ == o.dim_ && n_ == o.n_; }

private:
    int dim_;
    int n_;
    std::int64_t nodes_;
    double weight_;
};

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        double a = x < 0 ? -x : x;
        if (a > m) m = a;
    }
    return m;
}

}  // namespace nlhomog

#endif
