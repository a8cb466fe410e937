#include "nlhomog/dft.hpp"

#include <cmath>

namespace nlhomog {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// roots[r] = e^{-2 pi i r / N}; forward uses +index, inverse the conjugate
std::vector<std::complex<double>> unit_roots(int n) {
    std::vector<std::complex<double>> w(n);
    for (int r = 0; r < n; ++r)
        w[r] = std::complex<double>(std::cos(kTwoPi * r / n), -std::sin(kTwoPi * r / n));
    return w;
}

void transform_axis(CField& data, int n_axis, int count, int stride, bool inverse) {
    auto roots = unit_roots(n_axis);
    std::vector<std::complex<double>> line(n_axis), out(n_axis);
    // lines along the axis start at base indices enumerating the other axes
    for (int c = 0; c < count; ++c) {
        // base index: for stride s and axis length n, line c covers
        // offset(c) + k*stride; offsets enumerate the complement lattice
        int block = c / stride;
        int within = c % stride;
        std::size_t base = static_cast<std::size_t>(block) * n_axis * stride + within;
        for (int k = 0; k < n_axis; ++k) line[k] = data[base + static_cast<std::size_t>(k) * stride];
        for (int k = 0; k < n_axis; ++k) {
            std::complex<double> s(0.0, 0.0);
            for (int j = 0; j < n_axis; ++j) {
                int r = static_cast<int>((static_cast<long long>(j) * k) % n_axis);
                std::complex<double> w = roots[r];
                if (inverse) w = std::conj(w);
                s += line[j] * w;
            }
            out[k] = inverse ? s / static_cast<double>(n_axis) : s;
        }
        for (int k = 0; k < n_axis; ++k) data[base + static_cast<std::size_t>(k) * stride] = out[k];
    }
}

void transform(const TorusGrid& grid, CField& data, bool inverse) {
    const int n = grid.points_per_dim();
    if (grid.dim() == 1) {
        transform_axis(data, n, 1, 1, inverse);
        return;
    }
    // axis 1 (fastest), then axis 0
    transform_axis(data, n, n, 1, inverse);
    transform_axis(data, n, n, n, inverse);
}

}  // namespace

void dft_forward(const TorusGrid& grid, CField& data) { transform(grid, data, false); }
void dft_inverse(const TorusGrid& grid, CField& data) { transform(grid, data, true); }

CField to_complex(const Field& f) {
    CField c(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) c[i] = f[i];
    return c;
}

Field real_part(const CField& f) {
    Field r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = f[i].real();
    return r;
}

Field spectral_shift(const TorusGrid& grid, const Field& u, const Point& shift) {
    CField modes = to_complex(u);
    dft_forward(grid, modes);
    const int n = grid.points_per_dim();
    for (std::int64_t idx = 0; idx < grid.num_nodes(); ++idx) {
        auto c = grid.coords(idx);
        double phase = 0.0;
        for (int i = 0; i < grid.dim(); ++i)
            phase += kTwoPi * signed_freq(c[i], n) * shift[i];
        modes[idx] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
    dft_inverse(grid, modes);
    return real_part(modes);
}

}  // namespace nlhomog
