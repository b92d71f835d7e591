#include "ultrareg/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ultrareg {
namespace {

void validate(const WeightSequence& w) {
  if (w.log_m.size() < 2)
    throw Error(ErrorKind::parameter, "weight sequence needs at least M_0, M_1");
  if (std::abs(w.log_m[0]) > 1e-12)
    throw Error(ErrorKind::parameter, "weight sequence must have M_0 = 1");
  for (double v : w.log_m)
    if (!std::isfinite(v))
      throw Error(ErrorKind::domain, "weight sequence has non-finite entries");
}

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return 0.0;
  return (n * sxy - sx * sy) / den;
}

// Minimal ln A admissible at a given H; defect(p, ln H) must be <= ln A.
template <typename Defect>
GrowthWitness scan_h_grid(std::span<const double> h_grid, Defect defect) {
  if (h_grid.empty())
    throw Error(ErrorKind::parameter, "empty H grid");
  std::vector<double> log_a(h_grid.size());
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (!(h_grid[i] >= 1.0))
      throw Error(ErrorKind::parameter, "H grid entries must be >= 1");
    if (i > 0 && h_grid[i] <= h_grid[i - 1])
      throw Error(ErrorKind::parameter, "H grid must be strictly increasing");
    log_a[i] = defect(std::log(h_grid[i]));
  }
  GrowthWitness out;
  out.best_log_a = log_a.back();
  out.holds = out.best_log_a <= std::log(kGrowthACap);
  if (!out.holds) {
    out.constants = {std::exp(log_a.back()), h_grid.back()};
    return out;
  }
  // Witness: smallest H within a decade of the best attainable A.
  const double budget = out.best_log_a + std::log(10.0);
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (log_a[i] <= budget) {
      out.constants = {std::exp(log_a[i]), h_grid[i]};
      break;
    }
  }
  return out;
}

}  // namespace

std::span<const double> default_h_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g(64);
    for (std::size_t i = 0; i < g.size(); ++i)
      g[i] = std::pow(16.0, static_cast<double>(i) /
                                static_cast<double>(g.size() - 1));
    g.front() = 1.0;
    g.back() = 16.0;
    return g;
  }();
  return grid;
}

WeightSequence make_gevrey(double sigma, std::size_t max_order) {
  if (!(sigma >= 1.0))
    throw Error(ErrorKind::parameter, "gevrey index must be >= 1");
  if (max_order < 1)
    throw Error(ErrorKind::parameter, "max_order must be >= 1");
  WeightSequence w;
  w.log_m.resize(max_order + 1);
  for (std::size_t p = 0; p <= max_order; ++p)
    w.log_m[p] = sigma * std::lgamma(static_cast<double>(p) + 1.0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "gevrey-%g", sigma);
  w.label = buf;
  return w;
}

WeightSequence weights_from_values(std::span<const double> values,
                                   std::string label) {
  WeightSequence w;
  w.log_m.reserve(values.size());
  for (double v : values) {
    if (!(v > 0.0))
      throw Error(ErrorKind::parameter, "weight values must be positive");
    w.log_m.push_back(std::log(v));
  }
  w.label = std::move(label);
  validate(w);
  return w;
}

WeightSequence weights_from_logs(std::vector<double> log_values,
                                 std::string label) {
  WeightSequence w;
  w.log_m = std::move(log_values);
  w.label = std::move(label);
  validate(w);
  return w;
}

ConvexityReport check_log_convexity(const WeightSequence& w) {
  validate(w);
  ConvexityReport rep;
  rep.holds = true;
  rep.worst_defect = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 1; p + 1 < w.log_m.size(); ++p) {
    const double defect = 2.0 * w.log_m[p] - w.log_m[p - 1] - w.log_m[p + 1];
    if (defect > rep.worst_defect) rep.worst_defect = defect;
    if (defect > 1e-12 && rep.holds) {
      rep.holds = false;
      rep.first_violation = p;
    }
  }
  return rep;
}

GrowthWitness check_moderate_growth(const WeightSequence& w,
                                    std::span<const double> h_grid) {
  validate(w);
  if (h_grid.empty()) h_grid = default_h_grid();
  return scan_h_grid(h_grid, [&](double log_h) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < w.log_m.size(); ++p)
      for (std::size_t q = 0; q <= p; ++q) {
        const double d = w.log_m[p] - w.log_m[q] - w.log_m[p - q] -
                         static_cast<double>(p) * log_h;
        worst = std::max(worst, d);
      }
    return worst;
  });
}

GrowthWitness check_derivation_stability(const WeightSequence& w,
                                         std::span<const double> h_grid) {
  validate(w);
  if (h_grid.empty()) h_grid = default_h_grid();
  return scan_h_grid(h_grid, [&](double log_h) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p + 1 < w.log_m.size(); ++p) {
      const double d =
          w.log_m[p + 1] - w.log_m[p] - static_cast<double>(p) * log_h;
      worst = std::max(worst, d);
    }
    return worst;
  });
}

const char* to_string(SumVerdict v) {
  switch (v) {
    case SumVerdict::converges: return "converges";
    case SumVerdict::diverges: return "diverges";
    case SumVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

QuasianalyticReport check_non_quasianalytic(const WeightSequence& w) {
  validate(w);
  QuasianalyticReport rep;
  const std::size_t pmax = w.max_order();
  std::vector<double> log_p, log_term;
  for (std::size_t p = 1; p <= pmax; ++p) {
    const double lt = w.log_m[p - 1] - w.log_m[p];
    rep.partial_sum += std::exp(lt);
    if (p >= (pmax + 1) / 2) {
      log_p.push_back(std::log(static_cast<double>(p)));
      log_term.push_back(lt);
    }
  }
  if (log_p.size() < 4) {
    rep.verdict = SumVerdict::inconclusive;
    rep.decay_exponent = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  rep.decay_exponent = -fit_slope(log_p, log_term);
  if (rep.decay_exponent > kSumConvergeSlope)
    rep.verdict = SumVerdict::converges;
  else if (rep.decay_exponent < kSumDivergeSlope)
    rep.verdict = SumVerdict::diverges;
  else
    rep.verdict = SumVerdict::inconclusive;
  return rep;
}

WeightEnvelope::WeightEnvelope(WeightSequence w, double t_max,
                               std::size_t table_size)
    : weights_(std::move(w)), t_min_(1e-3), t_max_(t_max) {
  validate(weights_);
  if (!(t_max_ > t_min_))
    throw Error(ErrorKind::parameter, "envelope t_max must exceed 1e-3");
  if (table_size < 16)
    throw Error(ErrorKind::parameter, "envelope table too small");
  s_nodes_.resize(table_size);
  values_.resize(table_size);
  const double s_lo = std::log(t_min_);
  const double s_hi = std::log(t_max_);
  for (std::size_t i = 0; i < table_size; ++i) {
    const double s = s_lo + (s_hi - s_lo) * static_cast<double>(i) /
                                static_cast<double>(table_size - 1);
    s_nodes_[i] = s;
    values_[i] = value(std::exp(s));
  }
}

double WeightEnvelope::value(double t) const {
  if (!(t > 0.0))
    throw Error(ErrorKind::parameter, "envelope argument must be positive");
  const double s = std::log(t);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < weights_.log_m.size(); ++p)
    best = std::max(best, static_cast<double>(p) * s - weights_.log_m[p]);
  return best;
}

std::size_t WeightEnvelope::argmax_order(double t) const {
  if (!(t > 0.0))
    throw Error(ErrorKind::parameter, "envelope argument must be positive");
  const double s = std::log(t);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t p = 0; p < weights_.log_m.size(); ++p) {
    const double v = static_cast<double>(p) * s - weights_.log_m[p];
    if (v > best) {
      best = v;
      arg = p;
    }
  }
  return arg;
}

bool WeightEnvelope::argmax_interior(double t) const {
  return argmax_order(t) < weights_.max_order();
}

double WeightEnvelope::operator()(double t) const {
  if (!(t > 0.0))
    throw Error(ErrorKind::parameter, "envelope argument must be positive");
  if (t >= t_max_) return value(t);
  if (t <= t_min_) return values_.front();
  const double s = std::log(t);
  const double s_lo = s_nodes_.front();
  const double step = s_nodes_[1] - s_nodes_[0];
  const auto i = static_cast<std::size_t>((s - s_lo) / step);
  const std::size_t j = std::min(i + 1, s_nodes_.size() - 1);
  if (j == i) return values_[i];
  const double f = (s - s_nodes_[i]) / step;
  return values_[i] * (1.0 - f) + values_[j] * f;
}

std::vector<double> WeightEnvelope::recover_log_moments(std::size_t p_max) const {
  return recover_moments(p_max).log_m;
}

WeightEnvelope::MomentRecovery WeightEnvelope::recover_moments(
    std::size_t p_max) const {
  MomentRecovery out;
  out.log_m.assign(p_max + 1, -std::numeric_limits<double>::infinity());
  out.reliable.assign(p_max + 1, false);
  const std::size_t n = s_nodes_.size();
  for (std::size_t p = 0; p <= p_max; ++p) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      best = std::max(best, static_cast<double>(p) * s_nodes_[i] - values_[i]);
    out.log_m[p] = best;
    // The dual objective is flat on the segment owned by order p; the
    // recovery is trustworthy when some maximizer sits strictly inside
    // the table, so that segment is genuinely covered.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double v = static_cast<double>(p) * s_nodes_[i] - values_[i];
      if (v >= best - 1e-9) {
        out.reliable[p] = true;
        break;
      }
    }
  }
  return out;
}

DoublingReport check_moment_doubling(const WeightEnvelope& env, double H,
                                     double A) {
  if (!(H >= 1.0) || !(A > 0.0))
    throw Error(ErrorKind::parameter, "doubling check needs H >= 1, A > 0");
  DoublingReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  const double log_a = std::log(A);
  bool any = false;
  // Exact scans on both sides: interpolation error must not enter a
  // certificate margin.
  for (double s = std::log(env.t_min()); s <= std::log(env.t_max()) - std::log(H);
       s += 0.01) {
    const double t = std::exp(s);
    if (!env.argmax_interior(t * H))
      throw Error(ErrorKind::truncation,
                  "weight sequence too short for doubling check at this range");
    const double margin = env.value(t * H) + log_a - 2.0 * env.value(t);
    any = true;
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.worst_t = t;
    }
  }
  if (!any)
    throw Error(ErrorKind::geometry, "doubling check range is empty");
  rep.holds = rep.min_margin >= -1e-9;
  return rep;
}

UltradiffValidation validate_ultradiff_coefficients(
    const WeightSequence& w, std::span<const std::pair<int, double>> coeffs,
    double h, double c) {
  validate(w);
  if (!(h > 0.0) || !(c > 0.0))
    throw Error(ErrorKind::parameter, "coefficient bound needs h > 0, c > 0");
  if (coeffs.empty())
    throw Error(ErrorKind::parameter, "no coefficients supplied");
  const double log_h = std::log(h);
  const double log_c = std::log(c);
  UltradiffValidation out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  double log_min_c = -std::numeric_limits<double>::infinity();
  for (const auto& [k, a] : coeffs) {
    if (k < 0) throw Error(ErrorKind::parameter, "negative coefficient order");
    if (static_cast<std::size_t>(k) >= w.log_m.size())
      throw Error(ErrorKind::truncation,
                  "coefficient order exceeds the weight sequence length");
    if (a == 0.0) continue;
    const double lk = static_cast<double>(k);
    const double margin =
        log_c + lk * log_h - w.log_m[static_cast<std::size_t>(k)] -
        std::log(std::abs(a));
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_order = k;
    }
    log_min_c = std::max(log_min_c, std::log(std::abs(a)) +
                                        w.log_m[static_cast<std::size_t>(k)] -
                                        lk * log_h);
  }
  if (!std::isfinite(out.worst_margin)) {
    // All coefficients vanish: trivially admissible with any c.
    out.admissible = true;
    out.worst_margin = std::numeric_limits<double>::infinity();
    out.minimal_c = 0.0;
    return out;
  }
  out.admissible = out.worst_margin >= -1e-12;
  out.minimal_c = std::exp(log_min_c);
  return out;
}

}  // namespace ultrareg
