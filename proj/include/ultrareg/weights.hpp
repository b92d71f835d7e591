#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ultrareg/config.hpp"
#include "ultrareg/error.hpp"

namespace ultrareg {

// Derivative-growth weight sequence M_0, M_1, ..., stored in log space so
// factorial-type growth never overflows. M_0 must equal 1: every check and
// the envelope duality below normalise against it.
struct WeightSequence {
  std::vector<double> log_m;
  std::string label;

  std::size_t max_order() const { return log_m.size() - 1; }
  double log_at(std::size_t p) const { return log_m.at(p); }
};

// Factorial-power scale: M_p = (p!)^sigma, sigma >= 1.
WeightSequence make_gevrey(double sigma, std::size_t max_order = 64);

// User-supplied sequences. Values must be positive with M_0 = 1; the log
// variant takes ln M_p directly with log_m[0] = 0.
WeightSequence weights_from_values(std::span<const double> values,
                                   std::string label);
WeightSequence weights_from_logs(std::vector<double> log_values,
                                 std::string label);

// ---- structural checks ----

struct ConvexityReport {
  bool holds = false;
  // First p with M_p^2 > M_{p-1} M_{p+1}, meaningful only when !holds.
  std::size_t first_violation = 0;
  // Largest value of 2 ln M_p - ln M_{p-1} - ln M_{p+1} (positive = broken).
  double worst_defect = 0.0;
};
ConvexityReport check_log_convexity(const WeightSequence& w);

struct GrowthConstants {
  double A = 0.0;
  double H = 0.0;
};

// Witness search over a fixed H grid. For each H the minimal admissible A
// is computed in log space; the condition holds when the largest grid H
// admits A below the absolute cap, and the reported witness is the
// smallest H whose minimal A is within a decade of the best one (witness
// pairs trade off, so "smallest H at any cost" would report absurd A's).
struct GrowthWitness {
  bool holds = false;
  GrowthConstants constants;
  // ln of the minimal A at the largest grid H (the best attainable).
  double best_log_a = 0.0;
};

// Geometric grid of 64 candidate H values spanning [1, 16].
std::span<const double> default_h_grid();

// Absolute cap: no admissible A above this counts as a witness.
inline constexpr double kGrowthACap = 1e6;

// M_p <= A H^p M_q M_{p-q} for all 0 <= q <= p. An empty grid selects the
// default one.
GrowthWitness check_moderate_growth(const WeightSequence& w,
                                    std::span<const double> h_grid = {});

// M_{p+1} <= A H^p M_p for all p.
GrowthWitness check_derivation_stability(const WeightSequence& w,
                                         std::span<const double> h_grid = {});

enum class SumVerdict { converges, diverges, inconclusive };

const char* to_string(SumVerdict v);

// Convergence of sum_p M_{p-1} / M_p, decided by the fitted power-law
// decay of the terms over the upper half of the available orders. The
// sum converging is what permits compactly supported test functions in
// the class; term decay exponent > 1 converges, <= 1 diverges, and the
// band between the two thresholds is reported as inconclusive.
struct QuasianalyticReport {
  SumVerdict verdict = SumVerdict::inconclusive;
  double decay_exponent = 0.0;
  double partial_sum = 0.0;
};
QuasianalyticReport check_non_quasianalytic(const WeightSequence& w);

inline constexpr double kSumConvergeSlope = 1.2;
inline constexpr double kSumDivergeSlope = 1.05;

// ---- associated growth envelope ----

// N(t) = sup_p (p ln t - ln M_p), tabulated on a log-spaced t grid for
// fast interpolation. In s = ln t the envelope is a convex piecewise
// linear function with integer slopes, so linear interpolation between
// nodes is exact away from kinks and tiny near them.
class WeightEnvelope {
 public:
  WeightEnvelope(WeightSequence w, double t_max,
                 std::size_t table_size = defaults::kEnvelopeTable);

  // Exact scan over all orders.
  double value(double t) const;
  // Table lookup; clamps to the edge value below t_min and falls back to
  // the exact scan above t_max.
  double operator()(double t) const;

  std::size_t argmax_order(double t) const;
  // True when the sup at t is attained strictly before the last stored
  // order, i.e. the tabulated sequence is long enough for this t.
  bool argmax_interior(double t) const;

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  const WeightSequence& weights() const { return weights_; }

  // Dual recovery of ln M_p from the envelope table, p = 0..p_max. For a
  // log-convex sequence each order owns a flat segment of the dual
  // objective and the recovery is exact; otherwise it returns the
  // log-convex minorant.
  std::vector<double> recover_log_moments(std::size_t p_max) const;

  // Same recovery with per-order reliability: an order is reliable only
  // when its dual argmax lands strictly inside the table, so the flat
  // segment it owns is actually covered by the tabulated range.
  struct MomentRecovery {
    std::vector<double> log_m;
    std::vector<bool> reliable;
  };
  MomentRecovery recover_moments(std::size_t p_max) const;

 private:
  WeightSequence weights_;
  double t_min_;
  double t_max_;
  std::vector<double> s_nodes_;  // ln t
  std::vector<double> values_;
};

// 2 N(t) <= N(H t) + ln A over the envelope's table range (nodes whose
// H-multiple stays inside the range). min_margin is the worst value of
// N(H t) + ln A - 2 N(t); nonnegative margins certify the inequality.
struct DoublingReport {
  bool holds = false;
  double min_margin = 0.0;
  double worst_t = 0.0;
};
DoublingReport check_moment_doubling(const WeightEnvelope& env, double H, double A);

// ---- operator coefficient admissibility ----
// Coefficients of an infinite-order operator are admissible against the
// sequence when |a_k| <= c h^k / M_k for every supplied order k. Only the
// total order of each multi-index matters for the bound, so entries come
// as (order, coefficient) pairs. minimal_c is the smallest c making every
// entry admissible at this h (zero coefficients never constrain it).
struct UltradiffValidation {
  bool admissible = false;
  double worst_margin = 0.0;  // min over entries of ln(c h^k / M_k) - ln|a_k|
  int worst_order = 0;
  double minimal_c = 0.0;
};
UltradiffValidation validate_ultradiff_coefficients(
    const WeightSequence& w, std::span<const std::pair<int, double>> coeffs,
    double h, double c);

}  // namespace ultrareg
