#ifndef NLHOMOG_DFT_HPP
#define NLHOMOG_DFT_HPP

#include <complex>
#include <vector>

#include "nlhomog/grid.hpp"

namespace nlhomog {

using CField = std::vector<std::complex<double>>;

// Plain separable DFT on the node lattice, one axis at a time. Desk-scale
// grids keep the O(n N) cost irrelevant; no FFT library needed.
void dft_forward(const TorusGrid& grid, CField& data);
void dft_inverse(const TorusGrid& grid, CField& data);

// Index -> signed integer frequency on the unit torus.
inline int signed_freq(int index, int n) { return index <= n / 2 ? index : index - n; }

CField to_complex(const Field& f);
Field real_part(const CField& f);

// u(x + shift) for a grid-sampled field, via the modal phase factors.
Field spectral_shift(const TorusGrid& grid, const Field& u, const Point& shift);

}  // namespace nlhomog

#endif
