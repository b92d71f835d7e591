#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "ultrareg/error.hpp"

namespace ultrareg {

// One periodic sampling axis: points x_i = origin + i * dx, i = 0..n-1,
// representing the interval [origin, origin + n*dx). n is a power of two
// so the spectral path never needs padding or Bluestein fallbacks.
struct Axis {
  double origin = 0.0;
  double dx = 0.0;
  std::size_t n = 0;

  double length() const { return dx * static_cast<double>(n); }
  double point(std::size_t i) const { return origin + dx * static_cast<double>(i); }

  // Signed frequency of DFT mode i under the continuous convention
  // (angular frequency xi, spacing 2*pi/length).
  double freq(std::size_t i) const {
    const double dxi = 2.0 * std::numbers::pi / length();
    const auto half = static_cast<std::int64_t>(n / 2);
    auto k = static_cast<std::int64_t>(i);
    if (k >= half) k -= static_cast<std::int64_t>(n);
    return dxi * static_cast<double>(k);
  }

  // Nyquist (largest resolved) angular frequency, pi/dx.
  double nyquist() const { return std::numbers::pi / dx; }
};

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Rectangular sampling grid, one or two axes. Samples are stored row-major
// with the last axis contiguous.
struct Grid {
  std::vector<Axis> axes;

  static Grid make(std::vector<Axis> ax) {
    if (ax.empty() || ax.size() > 2)
      throw Error(ErrorKind::parameter, "grid must have 1 or 2 axes");
    for (const Axis& a : ax) {
      if (!is_pow2(a.n) || a.n < 256)
        throw Error(ErrorKind::parameter,
                    "axis size must be a power of two and at least 256");
      if (!(a.dx > 0.0))
        throw Error(ErrorKind::parameter, "axis spacing must be positive");
    }
    return Grid{std::move(ax)};
  }

  std::size_t dim() const { return axes.size(); }

  std::size_t size() const {
    std::size_t s = 1;
    for (const Axis& a : axes) s *= a.n;
    return s;
  }

  // Flat index of a (row, col) pair; 1-D grids use index(i).
  std::size_t index(std::size_t i) const { return i; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * axes[1].n + j; }

  bool same_geometry(const Grid& other) const {
    if (axes.size() != other.axes.size()) return false;
    for (std::size_t d = 0; d < axes.size(); ++d) {
      const Axis& a = axes[d];
      const Axis& b = other.axes[d];
      if (a.n != b.n || a.dx != b.dx || a.origin != b.origin) return false;
    }
    return true;
  }
};

inline Grid grid_1d(double origin, double dx, std::size_t n) {
  return Grid::make({Axis{origin, dx, n}});
}

inline Grid grid_2d(double origin0, double dx0, std::size_t n0, double origin1,
                    double dx1, std::size_t n1) {
  return Grid::make({Axis{origin0, dx0, n0}, Axis{origin1, dx1, n1}});
}

// Multi-index for derivative orders; unused trailing components are zero.
struct MultiIndex {
  std::array<int, 2> order{0, 0};

  int total() const { return order[0] + order[1]; }

  static MultiIndex d1(int m) {
    if (m < 0) throw Error(ErrorKind::parameter, "derivative order must be >= 0");
    return MultiIndex{{m, 0}};
  }
  static MultiIndex d2(int m0, int m1) {
    if (m0 < 0 || m1 < 0)
      throw Error(ErrorKind::parameter, "derivative order must be >= 0");
    return MultiIndex{{m0, m1}};
  }
};

}  // namespace ultrareg
