#include "ultrareg/mollifier.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "ultrareg/config.hpp"

namespace ultrareg {
namespace {

// Edge sliver where exp(-(1-x^2)^-beta) underflows anyway; treating it as
// exactly zero keeps the Taylor recurrences away from 1/u0 blow-up.
constexpr double kExpGuard = 700.0;
constexpr std::size_t kHalfTableSize = 1u << 16;
constexpr int kMaxJetOrder = 16;

const SmoothBump& shared_bump(double sigma) {
  static std::mutex mu;
  static std::map<double, SmoothBump> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(sigma);
  if (it == cache.end())
    it = cache.emplace(sigma, SmoothBump(sigma)).first;
  return it->second;
}

}  // namespace

SmoothBump::SmoothBump(double sigma) {
  if (!(sigma > 1.0) || !(sigma <= 4.0))
    throw Error(ErrorKind::parameter, "bump smoothness index must be in (1, 4]");
  sigma_ = sigma;
  beta_ = 1.0 / (sigma - 1.0);

  // Cumulative trapezoid of the raw profile over [-1, 0]. The profile is
  // even, so the full mass is exactly twice the half mass and cdf(0)
  // lands on 1/2 without cancellation.
  norm_ = 1.0;  // raw() reads norm_; keep it neutral while integrating
  const std::size_t m = kHalfTableSize;
  const double h = 1.0 / static_cast<double>(m);
  half_cum_.resize(m + 1);
  half_cum_[0] = 0.0;
  double prev = raw(-1.0);
  for (std::size_t i = 1; i <= m; ++i) {
    const double x = -1.0 + h * static_cast<double>(i);
    const double cur = raw(x);
    half_cum_[i] = half_cum_[i - 1] + 0.5 * (prev + cur) * h;
    prev = cur;
  }
  half_total_ = half_cum_.back();
  norm_ = 1.0 / (2.0 * half_total_);
}

double SmoothBump::raw(double x) const {
  const double u0 = 1.0 - x * x;
  if (u0 <= 0.0) return 0.0;
  const double e = std::pow(u0, -beta_);
  if (e > kExpGuard) return 0.0;
  return std::exp(-e);
}

double SmoothBump::value(double x) const { return norm_ * raw(x); }

std::vector<double> SmoothBump::derivatives(double x, int max_order) const {
  if (max_order < 0 || max_order > kMaxJetOrder)
    throw Error(ErrorKind::parameter, "jet order must be in [0, 16]");
  const std::size_t k = static_cast<std::size_t>(max_order) + 1;
  std::vector<double> out(k, 0.0);

  const double u0 = 1.0 - x * x;
  if (u0 <= 0.0) return out;
  const double q = -beta_;
  std::vector<double> v(k, 0.0), w(k, 0.0);
  v[0] = std::pow(u0, q);
  if (v[0] > kExpGuard) return out;

  // Taylor coefficients of u = 1 - x^2 around x.
  const double u1 = -2.0 * x;
  const double u2 = -1.0;

  // v = u^q via the power recurrence k u0 v_k = sum ((q+1) j - k) u_j v_{k-j}.
  for (std::size_t n = 1; n < k; ++n) {
    double acc = ((q + 1.0) * 1.0 - static_cast<double>(n)) * u1 * v[n - 1];
    if (n >= 2)
      acc += ((q + 1.0) * 2.0 - static_cast<double>(n)) * u2 * v[n - 2];
    v[n] = acc / (static_cast<double>(n) * u0);
  }

  // w = exp(-v) via k w_k = -sum j v_j w_{k-j}.
  w[0] = std::exp(-v[0]);
  for (std::size_t n = 1; n < k; ++n) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= n; ++j)
      acc -= static_cast<double>(j) * v[j] * w[n - j];
    w[n] = acc / static_cast<double>(n);
  }

  // Taylor coefficients to plain derivatives.
  double fact = 1.0;
  for (std::size_t n = 0; n < k; ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    out[n] = norm_ * w[n] * fact;
  }
  return out;
}

double SmoothBump::cdf(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > 0.0) return 1.0 - cdf(-x);
  const double m = static_cast<double>(kHalfTableSize);
  const double t = (x + 1.0) * m;
  auto i = static_cast<std::size_t>(t);
  if (i >= kHalfTableSize) i = kHalfTableSize - 1;
  const double f = t - static_cast<double>(i);
  const double raw_cum = half_cum_[i] * (1.0 - f) + half_cum_[i + 1] * f;
  return raw_cum * norm_;
}

SpectralPlateau::SpectralPlateau(double descent_sigma)
    : bump_(descent_sigma) {}

double SpectralPlateau::hat(double xi) const {
  const double a = std::abs(xi);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  // Descent profile T(s) = cdf(1 - 2s): flat 1 at s = 0, flat 0 at s = 1.
  return bump_.cdf(1.0 - 2.0 * (a - 1.0));
}

double window_value(const Window& w, const SmoothBump& profile,
                    std::span<const double> point) {
  if (point.size() != w.center.size())
    throw Error(ErrorKind::parameter, "window/point dimension mismatch");
  double out = 1.0;
  for (std::size_t d = 0; d < point.size(); ++d) {
    const double t = std::abs(point[d] - w.center[d]);
    if (t >= w.radius) return 0.0;
    if (t <= 0.5 * w.radius) continue;
    out *= profile.cdf(3.0 - 4.0 * t / w.radius);
  }
  return out;
}

std::vector<double> sample_window(const Window& w, const Grid& g) {
  if (w.center.size() != g.dim())
    throw Error(ErrorKind::parameter, "window/grid dimension mismatch");
  if (!(w.radius > 0.0))
    throw Error(ErrorKind::parameter, "window radius must be positive");
  for (const Axis& ax : g.axes) {
    if (w.radius < static_cast<double>(tol::kMinWindowCells) * ax.dx)
      throw Error(ErrorKind::resolution,
                  "window radius below the resolvable minimum for this grid");
    if (w.radius > 0.25 * ax.length() * (1.0 + 1e-12))
      throw Error(ErrorKind::geometry,
                  "window radius exceeds a quarter of the periodic domain");
  }
  const SmoothBump& profile = shared_bump(w.descent_sigma);

  // Distances wrap: the grids are periodic and windows near the edge must
  // close up seamlessly.
  auto axis_factor = [&](const Axis& ax, std::size_t i, double center) {
    const double len = ax.length();
    double d = std::abs(ax.point(i) - center);
    d = std::min(d, len - d);
    if (d >= w.radius) return 0.0;
    if (d <= 0.5 * w.radius) return 1.0;
    return profile.cdf(3.0 - 4.0 * d / w.radius);
  };

  std::vector<double> out(g.size(), 1.0);
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < g.axes[0].n; ++i)
      out[i] = axis_factor(g.axes[0], i, w.center[0]);
  } else {
    std::vector<double> f0(g.axes[0].n), f1(g.axes[1].n);
    for (std::size_t i = 0; i < g.axes[0].n; ++i)
      f0[i] = axis_factor(g.axes[0], i, w.center[0]);
    for (std::size_t j = 0; j < g.axes[1].n; ++j)
      f1[j] = axis_factor(g.axes[1], j, w.center[1]);
    for (std::size_t i = 0; i < g.axes[0].n; ++i)
      for (std::size_t j = 0; j < g.axes[1].n; ++j)
        out[g.index(i, j)] = f0[i] * f1[j];
  }
  return out;
}

}  // namespace ultrareg
