#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ultrareg/mollifier.hpp"
#include "ultrareg/net.hpp"
#include "ultrareg/regsets.hpp"
#include "ultrareg/weights.hpp"

namespace ultrareg {

// Classification pipeline: measure derivative sup-norms down the scale
// ladder, fit per-order loss exponents, and read off both the canonical
// regularity class and graded (weight-sequence) membership.

// ---- derivative scan ----

struct ScanOptions {
  // Largest total derivative order probed. Rows 0..max_order.
  int max_order = defaults::kScanOrderMax;
  // When set, sup-norms are taken over the window's plateau cells only.
  // The plateau must sit inside the grid's domain.
  std::optional<Window> region;
};

struct DerivativeScan {
  int max_order = 0;
  std::vector<double> eps;                // ladder scales, largest first
  std::vector<std::vector<double>> sup;   // sup[m][j]; in two dimensions the
                                          // row is the max over all mixed
                                          // partials of total order m
  std::optional<Window> region;
};

// Support rules propagate: scanning a net with a non-periodic axis throws
// from the derivative step for every order >= 1.
DerivativeScan scan(const Net& u, const ScanOptions& opt = {});

// ---- exponent fit ----

struct ExponentRow {
  double slope = 0.0;      // fitted N_m: d ln sup / d ln(1/eps)
  double intercept = 0.0;  // extrapolated ln sup at eps = 1
  double residual = 0.0;   // worst |ln sup - line| over the fitted rungs
  int points = 0;
  bool null_row = false;   // sup vanished somewhere on the fit window;
                           // slope is -infinity, the row carries no bound
};

struct ExponentFit {
  std::vector<ExponentRow> rows;  // index = total derivative order
  int first_rung = 0;             // fit window = [first_rung, first_rung + rung_count)
  int rung_count = 0;
  std::vector<double> eps;        // scales inside the fit window
};

// Fits the small-eps half of the ladder (at least 4 rungs; shorter ladders
// are refused). Rows that vanish anywhere on that window become null rows:
// an exact zero at small eps is stronger than any power decay, so the row
// is treated as carrying no growth at all.
ExponentFit fit_exponents(const DerivativeScan& s);

// ---- membership verdict ----

struct UltraVerdict {
  bool pass = true;
  double log_c_hat = 0.0;  // smallest ln C with intercept_m <= (m+1) ln C + ln M_m
  double margin = 0.0;     // worst tail excess over the head threshold;
                           // positive means fail by that much (in ln C units)
  int worst_order = -1;    // order attaining the margin, -1 if no tail rows
};

struct UltraReport {
  ExponentFit fit;
  RegularityClass verdict = RegularityClass::full();
  // All rows up to the null probe order decay at least like eps^4 (or are
  // exact-zero rows). Certifies negligibility up to that order only.
  bool null_up_to_probe = false;
  std::optional<UltraVerdict> ultra;  // present when weights were supplied
};

// Canonical class from the slopes via classify_exponents; graded membership
// from the intercepts. Finite data cannot see "some constant C exists", so
// the test is a head/tail comparison: per-order constants
// c_m = (intercept_m - ln M_m)/(m+1) are measured, the head is their max
// over low orders (m <= kHeadOrders), and the verdict fails when a higher
// order needs a constant beyond max(kHeadFactor * head, head + kHeadSlack).
UltraReport classify_membership(const ExponentFit& fit);
UltraReport classify_membership(const ExponentFit& fit,
                                const WeightSequence& m);

// Bound certificate for feeding an infinite-order operator: log_c from the
// measured constants, profile from the class verdict. Throws unless the
// report carries a passing graded verdict.
GradedBound graded_bound(const UltraReport& r);

// ---- embedding cross-check ----

struct CrosscheckReport {
  bool net_route = false;     // bounded-or-zero class and graded pass
  bool direct_route = false;  // derivative table of the sampled function
                              // itself stays within the weight budget
  bool agree = false;
};

// The embedding theorem made testable: a smooth function lies in the graded
// algebra's regular core exactly when its own derivative growth obeys the
// weight budget. The net route classifies the ladder; the direct route reads
// the coarsest rung's sample alone. Intended for constant embeddings.
CrosscheckReport denjoy_carleman_crosscheck(const Net& u,
                                            const WeightSequence& m);

// ---- localization ----

struct SingsuppOptions {
  int radius_cells = 16;     // full cutoff radius, in grid cells
  int stride_cells = 8;      // center spacing; <= radius keeps >= 50% overlap
  double window_sigma = 1.5; // cutoff smoothness grade; 1.5 sits inside every
                             // Gevrey class of grade >= 1.5, so the cutoff
                             // cannot manufacture singularities
  int max_order = 4;
};

// Graded singular support: centers of sliding windows where the cut-out
// piece fails membership for (m, target). One-dimensional nets only; the
// directional module handles spatial localization in two dimensions.
// Window centers keep one radius clear of the domain seam (a cut-out that
// straddles the seam is not a compact piece), so the sweep covers the
// interior. Resolution is one stride: reported points are window centers.
// Pieces below kWindowRelFloor of the net's per-rung scale are beneath the
// sweep's sensitivity floor and read as regular; a component fainter than
// that is invisible here.
std::vector<double> singular_support(const Net& u, const WeightSequence& m,
                                     const RegularityClass& target,
                                     const SingsuppOptions& opt = {});

struct PseudolocalityReport {
  std::vector<double> singular_u;
  std::vector<double> singular_pu;
  bool forward = false;  // singular(P u) inside singular(u), one radius slack
  bool reverse = false;  // informational converse, not implied in general
};

// Differential operators cannot spread the graded singular set: the forward
// inclusion must hold for any operator built from derivative terms and
// regular coefficients. The converse can fail (P may smooth), so it is
// reported but never required. The operator acts on each cut-out piece
// (localize first, then operate): pieces are compact, so the probe works on
// nets with non-periodic axes, and a window far from a singular core never
// sees the core's aliasing floor through a global transform.
PseudolocalityReport pseudolocality_probe(std::span<const DiffTerm> op,
                                          const Net& u,
                                          const WeightSequence& m,
                                          const RegularityClass& target,
                                          const SingsuppOptions& opt = {});

}  // namespace ultrareg
