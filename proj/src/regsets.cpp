#include "ultrareg/regsets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ultrareg {

RegularityClass RegularityClass::bounded(double b) {
  if (!(b >= 0.0) || !std::isfinite(b))
    throw Error(ErrorKind::parameter, "bounded class needs b >= 0");
  return {RegKind::bounded, 0.0, b};
}

RegularityClass RegularityClass::affine(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorKind::parameter, "affine class needs a, b >= 0");
  return {RegKind::affine, a, b};
}

double RegularityClass::bound_at(int m) const {
  if (m < 0) throw Error(ErrorKind::parameter, "order must be >= 0");
  switch (kind) {
    case RegKind::zero: return 0.0;
    case RegKind::bounded: return b;
    case RegKind::affine: return a * static_cast<double>(m) + b;
    case RegKind::full: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

bool RegularityClass::contains(const RegularityClass& other) const {
  if (kind == RegKind::full) return true;
  if (other.kind == RegKind::full) return false;
  // Compare profiles at m = 0 and slopes; both are nonnegative affine maps.
  const double slope = (kind == RegKind::affine) ? a : 0.0;
  const double oslope = (other.kind == RegKind::affine) ? other.a : 0.0;
  const double off = (kind == RegKind::zero) ? 0.0 : b;
  const double ooff = (other.kind == RegKind::zero) ? 0.0 : other.b;
  return oslope <= slope && ooff <= off;
}

std::string to_string(const RegularityClass& c) {
  char buf[80];
  switch (c.kind) {
    case RegKind::zero: return "zero";
    case RegKind::bounded:
      std::snprintf(buf, sizeof buf, "bounded(b=%g)", c.b);
      return buf;
    case RegKind::affine:
      std::snprintf(buf, sizeof buf, "affine(a=%g, b=%g)", c.a, c.b);
      return buf;
    case RegKind::full: return "full";
  }
  return "full";
}

ClosureResult closure_under_shift(const RegularityClass& c, int shift,
                                  double boost) {
  if (shift < 0 || !(boost >= 0.0))
    throw Error(ErrorKind::parameter, "shift and boost must be nonnegative");
  switch (c.kind) {
    case RegKind::zero:
      if (boost > 0.0)
        return {RegularityClass::bounded(boost), true};
      return {RegularityClass::zero(), false};
    case RegKind::bounded:
      return {RegularityClass::bounded(c.b + boost), false};
    case RegKind::affine:
      return {RegularityClass::affine(
                  c.a, c.b + c.a * static_cast<double>(shift) + boost),
              false};
    case RegKind::full:
      return {RegularityClass::full(), false};
  }
  return {RegularityClass::full(), false};
}

RegularityClass closure_under_max(const RegularityClass& c1,
                                  const RegularityClass& c2) {
  if (c1.kind == RegKind::full || c2.kind == RegKind::full)
    return RegularityClass::full();
  const RegKind kind = std::max(c1.kind, c2.kind);
  switch (kind) {
    case RegKind::zero: return RegularityClass::zero();
    case RegKind::bounded:
      return RegularityClass::bounded(std::max(c1.bound_at(0), c2.bound_at(0)));
    default:
      return RegularityClass::affine(
          std::max(c1.kind == RegKind::affine ? c1.a : 0.0,
                   c2.kind == RegKind::affine ? c2.a : 0.0),
          std::max(c1.bound_at(0), c2.bound_at(0)));
  }
}

RegularityClass closure_under_sum(const RegularityClass& c1,
                                  const RegularityClass& c2) {
  if (c1.kind == RegKind::full || c2.kind == RegKind::full)
    return RegularityClass::full();
  const RegKind kind = std::max(c1.kind, c2.kind);
  switch (kind) {
    case RegKind::zero: return RegularityClass::zero();
    case RegKind::bounded:
      return RegularityClass::bounded(c1.bound_at(0) + c2.bound_at(0));
    default:
      // a*l1 + a'*l2 <= max(a, a') * (l1 + l2), with offsets additive.
      return RegularityClass::affine(
          std::max(c1.kind == RegKind::affine ? c1.a : 0.0,
                   c2.kind == RegKind::affine ? c2.a : 0.0),
          c1.bound_at(0) + c2.bound_at(0));
  }
}

const char* to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::holds: return "holds";
    case StabilityVerdict::fails: return "fails";
    case StabilityVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

SeriesStabilityReport check_series_stability(const RegularityClass& c,
                                             double h,
                                             std::span<const double> eps_grid,
                                             int m_max) {
  if (!(h > 0.0))
    throw Error(ErrorKind::parameter, "coefficient ratio h must be positive");
  if (eps_grid.empty() || m_max < 0)
    throw Error(ErrorKind::parameter, "need a scale grid and m_max >= 0");
  for (double eps : eps_grid)
    if (!(eps > 0.0) || !(eps < 1.0))
      throw Error(ErrorKind::parameter, "eps must lie in (0, 1)");

  SeriesStabilityReport rep;
  if (c.kind == RegKind::full) {
    rep.verdict = StabilityVerdict::inconclusive;
    rep.ratio = std::numeric_limits<double>::quiet_NaN();
    rep.limit = std::numeric_limits<double>::quiet_NaN();
    rep.worst_eps = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  const double slope = (c.kind == RegKind::affine) ? c.a : 0.0;
  rep.worst_eps = eps_grid[0];
  rep.ratio = h * std::pow(eps_grid[0], -slope);
  for (double eps : eps_grid) {
    const double r = h * std::pow(eps, -slope);
    if (r > rep.ratio) {
      rep.ratio = r;
      rep.worst_eps = eps;
    }
  }
  if (rep.ratio < 1.0) {
    rep.verdict = StabilityVerdict::holds;
    rep.limit = 1.0 / (1.0 - rep.ratio);
    rep.n_star.resize(static_cast<std::size_t>(m_max) + 1);
    for (int m = 0; m <= m_max; ++m)
      rep.n_star[static_cast<std::size_t>(m)] = c.bound_at(m);
  } else {
    rep.verdict = StabilityVerdict::fails;
    rep.limit = std::numeric_limits<double>::infinity();
  }
  return rep;
}

SeriesStabilityReport check_series_stability(const RegularityClass& c,
                                             double h, double eps) {
  const double grid[1] = {eps};
  return check_series_stability(c, h, grid, 0);
}

RegularityClass classify_exponents(std::span<const int> orders,
                                   std::span<const double> exponents) {
  if (orders.size() != exponents.size() || orders.size() < 2)
    throw Error(ErrorKind::parameter,
                "need matching order/exponent tables with >= 2 rows");
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] < 0 || (i > 0 && orders[i] <= orders[i - 1]))
      throw Error(ErrorKind::parameter, "orders must be strictly increasing");
    if (!std::isfinite(exponents[i]))
      throw Error(ErrorKind::domain, "non-finite exponent entry");
  }

  double lo = exponents[0], hi = exponents[0];
  for (double e : exponents) {
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi <= tol::kZeroSlope) return RegularityClass::zero();
  if (hi - lo <= tol::kBoundedSpread) return RegularityClass::bounded(hi);

  // Least-squares line through (m, N_m), accepted if it explains every
  // row to within the pinned residual.
  const auto n = static_cast<double>(orders.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double x = orders[i];
    sx += x;
    sy += exponents[i];
    sxx += x * x;
    sxy += x * exponents[i];
  }
  const double den = n * sxx - sx * sx;
  const double slope = (n * sxy - sx * sy) / den;
  const double off = (sy - slope * sx) / n;
  double worst = 0.0;
  for (std::size_t i = 0; i < orders.size(); ++i)
    worst = std::max(worst,
                     std::abs(exponents[i] -
                              (slope * static_cast<double>(orders[i]) + off)));
  if (worst <= tol::kAffineResidual && slope > 0.0)
    return RegularityClass::affine(std::max(slope, 0.0), std::max(off, 0.0));
  return RegularityClass::full();
}

}  // namespace ultrareg
