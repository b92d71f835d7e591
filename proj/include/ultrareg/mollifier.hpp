#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ultrareg/error.hpp"
#include "ultrareg/grid.hpp"

namespace ultrareg {

// Compactly supported bump on [-1, 1]:
//   phi(x) = norm * exp(-(1 - x^2)^(-1/(sigma-1))),
// normalised to unit mass. The exponent 1/(sigma - 1) places the bump in
// the factorial-power smoothness class of index sigma; sigma = 2 gives the
// classical exp(-1/(1-x^2)) profile. Derivatives come from Taylor-mode
// recurrences (exact up to rounding), not finite differences.
class SmoothBump {
 public:
  // sigma in (1, 4]: below the class admits no compactly supported
  // members, above the spectral tail is too shallow for the quadrature
  // grid backing the normalisation.
  explicit SmoothBump(double sigma);

  double sigma() const { return sigma_; }

  double value(double x) const;

  // phi^(0..max_order) at x; max_order <= 16. Zero outside the support
  // and inside the underflow-guard sliver at the edges.
  std::vector<double> derivatives(double x, int max_order) const;

  // int_{-1}^{x} phi, exactly 1/2 at x = 0 and monotone.
  double cdf(double x) const;

 private:
  double raw(double x) const;  // unnormalised value

  double sigma_ = 0.0;
  double beta_ = 0.0;  // 1/(sigma-1)
  double norm_ = 0.0;
  std::vector<double> half_cum_;  // cumulative raw integral on [-1, 0]
  double half_total_ = 0.0;
};

// Smooth spectral multiplier: identically 1 on |xi| <= 1, descent on
// 1 < |xi| < 2 following the cdf profile of a SmoothBump, 0 beyond. Used
// as a unit-mass mollifier with all higher moments vanishing (the hat is
// flat at the origin).
class SpectralPlateau {
 public:
  explicit SpectralPlateau(double descent_sigma = 2.0);
  double hat(double xi) const;
  double descent_sigma() const { return bump_.sigma(); }

 private:
  SmoothBump bump_;
};

// Plateau cutoff window in physical space: 1 inside |x - center| <=
// radius/2 per axis (tensorised in 2-D), smooth descent to 0 at radius.
struct Window {
  std::vector<double> center;
  double radius = 0.0;
  double descent_sigma = 1.5;
};

// Window weight at a point (product across axes).
double window_value(const Window& w, const SmoothBump& profile,
                    std::span<const double> point);

// Sample the window on a grid. Throws when the window is narrower than
// the resolvable minimum or leaks outside the grid's domain.
std::vector<double> sample_window(const Window& w, const Grid& g);

}  // namespace ultrareg
