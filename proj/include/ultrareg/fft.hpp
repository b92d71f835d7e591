#pragma once

#include <complex>
#include <vector>

#include "ultrareg/grid.hpp"

namespace ultrareg {

using cvec = std::vector<std::complex<double>>;

// In-place iterative radix-2 DIT transform. sign = -1 forward, +1 inverse;
// the inverse applies the 1/n factor so fft(fft(x,-1),+1) == x.
void fft_inplace(cvec& data, int sign);

// Row-major 2-D transform over an n0 x n1 array (both powers of two).
void fft2_inplace(cvec& data, std::size_t n0, std::size_t n1, int sign);

// Transform respecting the grid dimension. Forward only reorders DFT bins;
// continuous-transform normalisation lives in Net::fourier.
void fft_grid(cvec& data, const Grid& g, int sign);

}  // namespace ultrareg
