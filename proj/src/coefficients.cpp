#include "nlhomog/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "nlhomog/errors.hpp"

namespace nlhomog {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double cos_product(const Point& x, int dim) {
    double c = 1.0;
    for (int i = 0; i < dim; ++i) c *= std::cos(kTwoPi * x[i]);
    return c;
}
}  // namespace

std::string to_string(MuFamily f) {
    switch (f) {
        case MuFamily::constant: return "constant";
        case MuFamily::separable: return "separable";
        case MuFamily::trig_product: return "trig_product";
        case MuFamily::tabulated: return "tabulated";
    }
    return "?";
}

MuFamily mu_family_from_string(const std::string& name) {
    if (name == "constant") return MuFamily::constant;
    if (name == "separable") return MuFamily::separable;
    if (name == "trig_product") return MuFamily::trig_product;
    if (name == "tabulated") return MuFamily::tabulated;
    throw ConfigError("unknown mu family: " + name);
}

CoefficientSpec CoefficientSpec::constant(int dim, double value) {
    if (!(value > 0.0)) throw ConfigError("constant mu: value must be positive");
    CoefficientSpec s;
    s.family_ = MuFamily::constant;
    s.dim_ = dim;
    s.params_ = {value};
    s.alpha1_ = s.alpha2_ = value;
    return s;
}

CoefficientSpec CoefficientSpec::separable(int dim, double p, double q) {
    if (std::abs(p) >= 1.0 || std::abs(q) >= 1.0)
        throw ConfigError("separable mu: |p|, |q| must be < 1 to keep mu positive");
    CoefficientSpec s;
    s.family_ = MuFamily::separable;
    s.dim_ = dim;
    s.params_ = {p, q};
    s.alpha1_ = (1.0 - std::abs(p)) * (1.0 - std::abs(q));
    s.alpha2_ = (1.0 + std::abs(p)) * (1.0 + std::abs(q));
    return s;
}

CoefficientSpec CoefficientSpec::trig_product(int dim, double amplitude, double scale) {
    if (std::abs(amplitude) >= 1.0)
        throw ConfigError("trig_product mu: |amplitude| must be < 1 to keep mu positive");
    if (!(scale > 0.0)) throw ConfigError("trig_product mu: scale must be positive");
    CoefficientSpec s;
    s.family_ = MuFamily::trig_product;
    s.dim_ = dim;
    s.params_ = {amplitude, scale};
    s.alpha1_ = scale * (1.0 - std::abs(amplitude));
    s.alpha2_ = scale * (1.0 + std::abs(amplitude));
    return s;
}

CoefficientSpec CoefficientSpec::tabulated(std::vector<double> table, int table_n) {
    if (table_n < 2 || static_cast<int>(table.size()) != table_n * table_n)
        throw ConfigError("tabulated mu: table must be n x n with n >= 2");
    CoefficientSpec s;
    s.family_ = MuFamily::tabulated;
    s.dim_ = 1;  // 4-dimensional tables are out of desk scale
    s.table_ = std::move(table);
    s.table_n_ = table_n;
    auto [lo, hi] = std::minmax_element(s.table_.begin(), s.table_.end());
    if (!(*lo > 0.0)) throw ConfigError("tabulated mu: all table values must be positive");
    s.alpha1_ = *lo;   // bilinear interpolation stays within the table range
    s.alpha2_ = *hi;
    return s;
}

bool CoefficientSpec::is_symmetric() const {
    switch (family_) {
        case MuFamily::constant:
        case MuFamily::trig_product:
            return true;
        case MuFamily::separable:
            return params_[0] == params_[1];
        case MuFamily::tabulated: {
            for (int i = 0; i < table_n_; ++i)
                for (int j = i + 1; j < table_n_; ++j)
                    if (table_[i * table_n_ + j] != table_[j * table_n_ + i]) return false;
            return true;
        }
    }
    return false;
}

double CoefficientSpec::lambda_factor(const Point& x) const {
    if (family_ == MuFamily::constant) return params_[0];
    if (family_ == MuFamily::separable) return 1.0 + params_[0] * cos_product(x, dim_);
    throw CapabilityError("lambda_factor: mu family is not separable");
}

double CoefficientSpec::nu_factor(const Point& y) const {
    if (family_ == MuFamily::constant) return 1.0;
    if (family_ == MuFamily::separable) return 1.0 + params_[1] * cos_product(y, dim_);
    throw CapabilityError("nu_factor: mu family is not separable");
}

double CoefficientSpec::eval_raw(const Point& x, const Point& y) const {
    switch (family_) {
        case MuFamily::constant:
            return params_[0];
        case MuFamily::separable:
            return lambda_factor(x) * nu_factor(y);
        case MuFamily::trig_product:
            return params_[1] * (1.0 + params_[0] * cos_product(x, dim_) * cos_product(y, dim_));
        case MuFamily::tabulated: {
            double u = reduce_mod1(x[0]) * table_n_;
            double v = reduce_mod1(y[0]) * table_n_;
            int i0 = static_cast<int>(u), j0 = static_cast<int>(v);
            if (i0 == table_n_) i0 = 0;   // guard u == n from rounding
            if (j0 == table_n_) j0 = 0;
            double tx = u - i0, ty = v - j0;
            int i1 = (i0 + 1) % table_n_, j1 = (j0 + 1) % table_n_;
            return (1.0 - tx) * (1.0 - ty) * table_[i0 * table_n_ + j0] +
                   tx * (1.0 - ty) * table_[i1 * table_n_ + j0] +
                   (1.0 - tx) * ty * table_[i0 * table_n_ + j1] +
                   tx * ty * table_[i1 * table_n_ + j1];
        }
    }
    throw ConfigError("eval_mu: unknown mu family");
}

double CoefficientSpec::eval(const Point& x, const Point& y) const {
    Point xr{}, yr{};
    for (int i = 0; i < dim_; ++i) {
        xr[i] = reduce_mod1(x[i]);
        yr[i] = reduce_mod1(y[i]);
    }
    double v = eval_raw(xr, yr);
    double slack = 1e-12 * std::max(1.0, alpha2_);
    if (v < alpha1_ - slack || v > alpha2_ + slack)
        throw ConfigError("eval_mu: value " + std::to_string(v) +
                          " outside declared bounds [" + std::to_string(alpha1_) + ", " +
                          std::to_string(alpha2_) + "]");
    return v;
}

double eval_mu(const CoefficientSpec& spec, const Point& x, const Point& y) {
    return spec.eval(x, y);
}

}  // namespace nlhomog
