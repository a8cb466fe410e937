#ifndef NLHOMOG_COEFFICIENTS_HPP
#define NLHOMOG_COEFFICIENTS_HPP

#include <string>
#include <vector>

#include "nlhomog/grid.hpp"

namespace nlhomog {

enum class MuFamily { constant, separable, trig_product, tabulated };

std::string to_string(MuFamily f);
MuFamily mu_family_from_string(const std::string& name);

// Periodic rate modulation mu(x, y), 1-periodic in each argument separately,
// with two-sided bounds 0 < alpha1 <= mu <= alpha2. Bounds are derived from
// the family parameters at construction and re-checked on every evaluation.
class CoefficientSpec {
public:
    static CoefficientSpec constant(int dim, double value);
    // lambda(x) nu(y) with lambda = 1 + p prod_i cos(2 pi x_i), nu likewise with q.
    static CoefficientSpec separable(int dim, double p, double q);
    // scale * (1 + p prod_i cos(2 pi x_i) prod_i cos(2 pi y_i)); symmetric,
    // not separable.
    static CoefficientSpec trig_product(int dim, double amplitude, double scale = 1.0);
    // Periodic bilinear interpolation of an n x n table (d = 1 only).
    static CoefficientSpec tabulated(std::vector<double> table, int table_n);

    MuFamily family() const { return family_; }
    int dim() const { return dim_; }
    double alpha1() const { return alpha1_; }
    double alpha2() const { return alpha2_; }

    bool is_constant() const { return family_ == MuFamily::constant; }
    bool is_separable() const {
        return family_ == MuFamily::constant || family_ == MuFamily::separable;
    }
    // mu(x, y) = mu(y, x) for every sampled pair (exact for these formulas).
    bool is_symmetric() const;

    // Factors of the separable form; only valid when is_separable().
    double lambda_factor(const Point& x) const;
    double nu_factor(const Point& y) const;

    double eval(const Point& x, const Point& y) const;

private:
    CoefficientSpec() = default;
    double eval_raw(const Point& x, const Point& y) const;

    MuFamily family_ = MuFamily::constant;
    int dim_ = 1;
    std::vector<double> params_;
    std::vector<double> table_;
    int table_n_ = 0;
    double alpha1_ = 1.0;
    double alpha2_ = 1.0;
};

// Value within [alpha1, alpha2]; arguments reduced mod 1 internally.
double eval_mu(const CoefficientSpec& spec, const Point& x, const Point& y);

}  // namespace nlhomog

#endif
