#include "nlhomog/kernels.hpp"

#include <cmath>
#include <random>

#include "nlhomog/errors.hpp"
#include "nlhomog/perturbation.hpp"

namespace nlhomog {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double sq_norm(const Point& z, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += z[i] * z[i];
    return s;
}

void require_finite(const Point& z, int dim) {
    for (int i = 0; i < dim; ++i)
        if (!std::isfinite(z[i])) throw InputError("eval_kernel: non-finite point");
}

double gaussian_norm(int dim, double sigma) {
    double c = 1.0;
    for (int i = 0; i < dim; ++i) c /= sigma * std::sqrt(kTwoPi);
    return c;
}

double bump_profile(const Point& z, int dim, double radius) {
    double t = sq_norm(z, dim) / (radius * radius);
    if (t >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t));
}

}  // namespace

std::string to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::gaussian: return "gaussian";
        case KernelFamily::shifted_gaussian: return "shifted_gaussian";
        case KernelFamily::anisotropic_gaussian: return "anisotropic_gaussian";
        case KernelFamily::compact_bump: return "compact_bump";
        case KernelFamily::composite_biased: return "composite_biased";
    }
    return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "gaussian") return KernelFamily::gaussian;
    if (name == "shifted_gaussian") return KernelFamily::shifted_gaussian;
    if (name == "anisotropic_gaussian") return KernelFamily::anisotropic_gaussian;
    if (name == "compact_bump") return KernelFamily::compact_bump;
    if (name == "composite_biased") return KernelFamily::composite_biased;
    throw ConfigError("unknown kernel family: " + name);
}

KernelSpec KernelSpec::gaussian(int dim, double sigma) {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("gaussian kernel: bad dim");
    if (!(sigma > 0.0)) throw ConfigError("gaussian kernel: sigma must be positive");
    KernelSpec s;
    s.family_ = KernelFamily::gaussian;
    s.dim_ = dim;
    s.params_ = {sigma};
    s.decay_radius_ = 8.0 * sigma;  // tail mass and tail second moment < 1e-14
    return s;
}

KernelSpec KernelSpec::shifted_gaussian(int dim, double sigma, Point shift) {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("shifted_gaussian kernel: bad dim");
    if (!(sigma > 0.0)) throw ConfigError("shifted_gaussian kernel: sigma must be positive");
    KernelSpec s;
    s.family_ = KernelFamily::shifted_gaussian;
    s.dim_ = dim;
    s.params_.push_back(sigma);
    double shift_norm = 0.0;
    for (int i = 0; i < dim; ++i) {
        s.params_.push_back(shift[i]);
        shift_norm += shift[i] * shift[i];
    }
    s.decay_radius_ = 8.0 * sigma + std::sqrt(shift_norm);
    return s;
}

KernelSpec KernelSpec::anisotropic_gaussian(int dim, DMat covariance) {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("anisotropic_gaussian kernel: bad dim");
    KernelSpec s;
    s.family_ = KernelFamily::anisotropic_gaussian;
    s.dim_ = dim;
    double det;
    if (dim == 1) {
        det = covariance[0][0];
        s.params_ = {covariance[0][0]};
    } else {
        if (std::abs(covariance[0][1] - covariance[1][0]) > 1e-14)
            throw ConfigError("anisotropic_gaussian kernel: covariance must be symmetric");
        det = covariance[0][0] * covariance[1][1] - covariance[0][1] * covariance[0][1];
        s.params_ = {covariance[0][0], covariance[0][1], covariance[1][1]};
    }
    if (!(det > 0.0) || !(covariance[0][0] > 0.0))
        throw ConfigError("anisotropic_gaussian kernel: covariance not positive definite");
    // largest eigenvalue bounds the per-direction spread
    double lmax;
    if (dim == 1) {
        lmax = covariance[0][0];
    } else {
        double tr = covariance[0][0] + covariance[1][1];
        double disc = std::sqrt(tr * tr / 4.0 - det);
        lmax = tr / 2.0 + disc;
    }
    s.decay_radius_ = 8.0 * std::sqrt(lmax);
    return s;
}

KernelSpec KernelSpec::compact_bump(int dim, double radius) {
    if (dim < 1 || dim > kMaxDim) throw ConfigError("compact_bump kernel: bad dim");
    if (!(radius > 0.0)) throw ConfigError("compact_bump kernel: radius must be positive");
    KernelSpec s;
    s.family_ = KernelFamily::compact_bump;
    s.dim_ = dim;
    s.decay_radius_ = radius;
    ScalarKernel raw{dim, radius, [dim, radius](const Point& z) {
                         return bump_profile(z, dim, radius);
                     }};
    double raw_mass = moment_quadrature(raw, {}, 1e-14);
    s.params_ = {radius, 1.0 / raw_mass};
    return s;
}

KernelSpec KernelSpec::composite_biased(KernelSpec base,
                                        std::shared_ptr<const PerturbationSpec> pert,
                                        std::uint64_t sample_seed) {
    if (!pert) throw ConfigError("composite_biased kernel: missing perturbation");
    if (base.dim() != pert->dim())
        throw ConfigError("composite_biased kernel: dimension mismatch");
    KernelSpec s;
    s.family_ = KernelFamily::composite_biased;
    s.dim_ = base.dim();
    s.decay_radius_ = std::max(base.decay_radius(), pert->decay_radius());
    s.base_ = std::make_shared<KernelSpec>(std::move(base));
    s.pert_ = std::move(pert);

    // Nonnegativity of a_sym + ell.c is a hypothesis, not a theorem here;
    // validate it by sampling inside the decay box.
    std::mt19937_64 rng(sample_seed);
    std::uniform_real_distribution<double> u(-s.decay_radius_, s.decay_radius_);
    for (int k = 0; k < 100000; ++k) {
        Point z{};
        for (int i = 0; i < s.dim_; ++i) z[i] = u(rng);
        if (eval_kernel(s, z) < -1e-14)
            throw ConfigError("composite_biased kernel: negative density sampled; ell too large");
    }
    return s;
}

double eval_kernel(const KernelSpec& spec, const Point& z) {
    require_finite(z, spec.dim());
    const auto& p = spec.params();
    switch (spec.family()) {
        case KernelFamily::gaussian: {
            double sigma = p[0];
            return gaussian_norm(spec.dim(), sigma) *
                   std::exp(-sq_norm(z, spec.dim()) / (2.0 * sigma * sigma));
        }
        case KernelFamily::shifted_gaussian: {
            double sigma = p[0];
            Point w{};
            for (int i = 0; i < spec.dim(); ++i) w[i] = z[i] - p[1 + i];
            return gaussian_norm(spec.dim(), sigma) *
                   std::exp(-sq_norm(w, spec.dim()) / (2.0 * sigma * sigma));
        }
        case KernelFamily::anisotropic_gaussian: {
            if (spec.dim() == 1) {
                double v = p[0];
                return std::exp(-z[0] * z[0] / (2.0 * v)) / std::sqrt(kTwoPi * v);
            }
            double a = p[0], b = p[1], c = p[2];
            double det = a * c - b * b;
            double q = (c * z[0] * z[0] - 2.0 * b * z[0] * z[1] + a * z[1] * z[1]) / det;
            return std::exp(-0.5 * q) / (kTwoPi * std::sqrt(det));
        }
        case KernelFamily::compact_bump:
            return p[1] * bump_profile(z, spec.dim(), p[0]);
        case KernelFamily::composite_biased:
            return eval_kernel(*spec.base(), z) + spec.perturbation()->combined(z);
    }
    throw ConfigError("eval_kernel: unknown kernel family");
}

ScalarKernel evaluator(const KernelSpec& spec) {
    auto copy = std::make_shared<KernelSpec>(spec);
    return ScalarKernel{spec.dim(), spec.decay_radius(),
                        [copy](const Point& z) { return eval_kernel(*copy, z); }};
}

double moment_quadrature(const ScalarKernel& k, const std::array<int, kMaxDim>& alpha,
                         double tol) {
    const int dim = k.dim;
    const double radius = k.decay_radius;
    const int n_cap = dim == 1 ? (1 << 21) : 4096;

    auto weighted_sum = [&](int n) {
        double h = 2.0 * radius / n;
        double s = 0.0;
        if (dim == 1) {
            for (int i = 0; i < n; ++i) {
                Point z{-radius + (i + 0.5) * h, 0.0};
                double w = 1.0;
                for (int a = 0; a < alpha[0]; ++a) w *= z[0];
                s += w * k(z);
            }
            return s * h;
        }
        for (int i = 0; i < n; ++i) {
            double zi = -radius + (i + 0.5) * h;
            double row = 0.0;
            for (int j = 0; j < n; ++j) {
                Point z{zi, -radius + (j + 0.5) * h};
                double w = 1.0;
                for (int a = 0; a < alpha[0]; ++a) w *= z[0];
                for (int a = 0; a < alpha[1]; ++a) w *= z[1];
                row += w * k(z);
            }
            s += row;
        }
        return s * h * h;
    };

    int n = 64;
    double prev = weighted_sum(n);
    double achieved = std::numeric_limits<double>::infinity();
    while (n < n_cap) {
        n *= 2;
        double cur = weighted_sum(n);
        achieved = std::abs(cur - prev);
        prev = cur;
        if (achieved < tol) return cur;
    }
    throw NumericalError("moment_quadrature: did not reach tolerance " + std::to_string(tol),
                         achieved);
}

Moments kernel_moments(const KernelSpec& spec, double tol) {
    const int d = spec.dim();
    const auto& p = spec.params();
    Moments m;
    switch (spec.family()) {
        case KernelFamily::gaussian: {
            m.mass = 1.0;
            for (int i = 0; i < d; ++i) m.second[i][i] = p[0] * p[0];
            return m;
        }
        case KernelFamily::shifted_gaussian: {
            m.mass = 1.0;
            for (int i = 0; i < d; ++i) m.first[i] = p[1 + i];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    m.second[i][j] = (i == j ? p[0] * p[0] : 0.0) + p[1 + i] * p[1 + j];
            return m;
        }
        case KernelFamily::anisotropic_gaussian: {
            m.mass = 1.0;
            if (d == 1) {
                m.second[0][0] = p[0];
            } else {
                m.second[0][0] = p[0];
                m.second[0][1] = m.second[1][0] = p[1];
                m.second[1][1] = p[2];
            }
            return m;
        }
        case KernelFamily::compact_bump: {
            m.mass = 1.0;   // normalized at construction
            // even profile: odd moments vanish, second moment by quadrature
            ScalarKernel k = evaluator(spec);
            for (int i = 0; i < d; ++i) {
                std::array<int, kMaxDim> alpha{};
                alpha[i] = 2;
                m.second[i][i] = moment_quadrature(k, alpha, tol);
            }
            return m;
        }
        case KernelFamily::composite_biased: {
            ScalarKernel k = evaluator(spec);
            m.mass = moment_quadrature(k, {}, tol);
            for (int i = 0; i < d; ++i) {
                std::array<int, kMaxDim> alpha{};
                alpha[i] = 1;
                m.first[i] = moment_quadrature(k, alpha, tol);
            }
            for (int i = 0; i < d; ++i)
                for (int j = i; j < d; ++j) {
                    std::array<int, kMaxDim> alpha{};
                    alpha[i] += 1;
                    alpha[j] += 1;
                    m.second[i][j] = m.second[j][i] = moment_quadrature(k, alpha, tol);
                }
            return m;
        }
    }
    throw ConfigError("kernel_moments: unknown kernel family");
}

}  // namespace nlhomog
