#include "ultrareg/fft.hpp"

#include <numbers>

namespace ultrareg {
namespace {

void bit_reverse(cvec& a) {
  const std::size_t n = a.size();
  std::size_t j = 0;
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
}

}  // namespace

void fft_inplace(cvec& data, int sign) {
  const std::size_t n = data.size();
  if (n == 0) throw Error(ErrorKind::domain, "fft of empty vector");
  if (!is_pow2(n))
    throw Error(ErrorKind::parameter, "fft length must be a power of two");
  if (sign != 1 && sign != -1)
    throw Error(ErrorKind::parameter, "fft sign must be +1 or -1");

  bit_reverse(data);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        static_cast<double>(sign) * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (sign == 1) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : data) z *= inv;
  }
}

void fft2_inplace(cvec& data, std::size_t n0, std::size_t n1, int sign) {
  if (data.size() != n0 * n1)
    throw Error(ErrorKind::parameter, "fft2 size mismatch");
  // Rows (contiguous), then columns via a strided gather.
  cvec row(n1);
  for (std::size_t i = 0; i < n0; ++i) {
    std::copy(data.begin() + static_cast<std::ptrdiff_t>(i * n1),
              data.begin() + static_cast<std::ptrdiff_t>((i + 1) * n1), row.begin());
    fft_inplace(row, sign);
    std::copy(row.begin(), row.end(),
              data.begin() + static_cast<std::ptrdiff_t>(i * n1));
  }
  cvec col(n0);
  for (std::size_t j = 0; j < n1; ++j) {
    for (std::size_t i = 0; i < n0; ++i) col[i] = data[i * n1 + j];
    fft_inplace(col, sign);
    for (std::size_t i = 0; i < n0; ++i) data[i * n1 + j] = col[i];
  }
}

void fft_grid(cvec& data, const Grid& g, int sign) {
  if (data.size() != g.size())
    throw Error(ErrorKind::compatibility, "data size does not match grid");
  if (g.dim() == 1) {
    fft_inplace(data, sign);
  } else {
    fft2_inplace(data, g.axes[0].n, g.axes[1].n, sign);
  }
}

}  // namespace ultrareg
