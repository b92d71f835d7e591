#pragma once

#include <span>
#include <string>
#include <vector>

#include "ultrareg/config.hpp"
#include "ultrareg/error.hpp"

namespace ultrareg {

// Canonical families of admissible loss-exponent profiles m -> N(m),
// ordered zero < bounded < affine < full. N(m) caps the blow-up rate
// eps^{-N(m)} of order-m derivatives along the scale ladder.
enum class RegKind { zero, bounded, affine, full };

struct RegularityClass {
  RegKind kind = RegKind::full;
  double a = 0.0;  // slope, affine only
  double b = 0.0;  // offset, bounded and affine

  static RegularityClass zero() { return {RegKind::zero, 0.0, 0.0}; }
  static RegularityClass bounded(double b);
  static RegularityClass affine(double a, double b);
  static RegularityClass full() { return {RegKind::full, 0.0, 0.0}; }

  // The profile value N(m); +infinity for the full class.
  double bound_at(int m) const;

  // Family partial order: true when every profile admitted by `other`
  // is admitted by *this.
  bool contains(const RegularityClass& other) const;

  bool operator==(const RegularityClass& o) const {
    return kind == o.kind && a == o.a && b == o.b;
  }
};

std::string to_string(const RegularityClass& c);

// ---- closure operations ----
// Each returns the smallest canonical class guaranteed to admit the
// transformed profile. `escalated` flags a forced move to a wider family
// (the zero family is not shift-stable when the boost is positive).

struct ClosureResult {
  RegularityClass result;
  bool escalated = false;
};

// m -> N(m + shift) + boost stays admissible.
ClosureResult closure_under_shift(const RegularityClass& c, int shift,
                                  double boost);
// m -> max(N1(m), N2(m)).
RegularityClass closure_under_max(const RegularityClass& c1,
                                  const RegularityClass& c2);
// Split-index sums: the result profile dominates N1(l1) + N2(l2) at every
// split l1 + l2 = m. For affine profiles a*l1 + a'*l2 + b + b' is at most
// max(a, a') * (l1 + l2) + b + b', so slopes combine by max, offsets by sum.
RegularityClass closure_under_sum(const RegularityClass& c1,
                                  const RegularityClass& c2);

// ---- series stability ----
// Summability of sum_k h^k eps^{-N(k+m)} uniformly over a scale grid:
// the terms form a geometric series with ratio h * eps^{-a}, worst at the
// smallest eps. When that contracts, the sum is bounded by L * eps^{-N*(m)}
// with L = 1/(1 - worst ratio) and N*(m) = N(m). The full class gives no
// finite profile to sum against.

enum class StabilityVerdict { holds, fails, inconclusive };

const char* to_string(StabilityVerdict v);

struct SeriesStabilityReport {
  StabilityVerdict verdict = StabilityVerdict::inconclusive;
  double ratio = 0.0;      // worst-case term ratio over the eps grid
  double limit = 0.0;      // L: sum_k ratio^k at the worst eps
  double worst_eps = 0.0;  // grid point attaining the worst ratio
  std::vector<double> n_star;  // N*(m) for m = 0..m_max when conclusive
};

SeriesStabilityReport check_series_stability(const RegularityClass& c,
                                             double h,
                                             std::span<const double> eps_grid,
                                             int m_max);

// Single-scale convenience form.
SeriesStabilityReport check_series_stability(const RegularityClass& c,
                                             double h, double eps);

// ---- exponent-table classification ----
// Given fitted loss exponents per derivative order (orders are the true
// derivative orders, starting at zero), pick the tightest canonical class
// whose profile dominates the table within the pinned tolerances.
RegularityClass classify_exponents(std::span<const int> orders,
                                   std::span<const double> exponents);

}  // namespace ultrareg
