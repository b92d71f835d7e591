#include <cmath>
#include <vector>

#include "doctest.h"
#include "ultrareg/weights.hpp"

using namespace ultrareg;

namespace {

// Independent factorial-power oracle: cumulative sums of ln j instead of
// lgamma, so the production path is cross-checked against plain addition.
std::vector<double> gevrey_logs_by_summation(double sigma, std::size_t pmax) {
  std::vector<double> out(pmax + 1, 0.0);
  double acc = 0.0;
  for (std::size_t p = 1; p <= pmax; ++p) {
    acc += std::log(static_cast<double>(p));
    out[p] = sigma * acc;
  }
  return out;
}

}  // namespace

TEST_CASE("factorial-power weights match the summation oracle") {
  const auto w = make_gevrey(2.0, 40);
  const auto oracle = gevrey_logs_by_summation(2.0, 40);
  REQUIRE(w.log_m.size() == 41);
  for (std::size_t p = 0; p <= 40; ++p)
    CHECK(w.log_m[p] == doctest::Approx(oracle[p]).epsilon(1e-12));
  CHECK(w.label == "gevrey-2");
}

TEST_CASE("weight constructors reject broken input") {
  CHECK_THROWS_AS(make_gevrey(0.5, 10), Error);
  const double not_normalised[] = {2.0, 4.0, 16.0};
  CHECK_THROWS_AS(weights_from_values(not_normalised, "bad"), Error);
  const double negative[] = {1.0, -3.0};
  CHECK_THROWS_AS(weights_from_values(negative, "bad"), Error);
  CHECK_THROWS_AS(weights_from_logs({0.0}, "too-short"), Error);
}

TEST_CASE("log-convexity verdicts") {
  CHECK(check_log_convexity(make_gevrey(1.0, 30)).holds);
  CHECK(check_log_convexity(make_gevrey(2.0, 30)).holds);

  // M = (1, 2, 3): M_1^2 = 4 > M_0 M_2 = 3, defect ln(4/3).
  const double bump[] = {1.0, 2.0, 3.0};
  const auto rep = check_log_convexity(weights_from_values(bump, "non-convex"));
  CHECK_FALSE(rep.holds);
  CHECK(rep.first_violation == 1);
  CHECK(rep.worst_defect == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("moderate growth witnesses on factorial powers") {
  // Binomial oracle: (p! / (q! (p-q)!))^s <= (2^s)^p with equality trend at
  // the central column, so clean witnesses sit at H near 2^s with A = 1.
  // At finite truncation the central binomial's -log(p)/2 correction lets
  // slightly smaller H through; the witness may land one or two grid
  // points below 2^s but never above it, and always with A = 1.
  const auto g1 = check_moderate_growth(make_gevrey(1.0, 64));
  CHECK(g1.holds);
  CHECK(g1.constants.H >= 1.7);
  CHECK(g1.constants.H <= 2.001);
  CHECK(g1.constants.A == doctest::Approx(1.0).epsilon(1e-12));

  const auto g2 = check_moderate_growth(make_gevrey(2.0, 64));
  CHECK(g2.holds);
  CHECK(g2.constants.H >= 3.2);
  CHECK(g2.constants.H <= 4.001);
  CHECK(g2.constants.A == doctest::Approx(1.0).epsilon(1e-12));

  // The default grid spans [1, 16] geometrically.
  const auto grid = default_h_grid();
  REQUIRE(grid.size() == 64);
  CHECK(grid.front() == 1.0);
  CHECK(grid.back() == 16.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
    CHECK(grid[i] / grid[i - 1] ==
          doctest::Approx(std::pow(16.0, 1.0 / 63.0)).epsilon(1e-9));
  }
}

TEST_CASE("super-factorial sequence fails moderate growth but not derivation") {
  // ln M_p = p^2: the central split defect 2q(p-q) - p ln H grows without
  // bound, but the one-step ratio ln M_{p+1} - ln M_p = 2p + 1 is matched
  // by H = 8 (ln 8 > 2) with A = e at p = 0.
  std::vector<double> logs(17);
  for (std::size_t p = 0; p < logs.size(); ++p)
    logs[p] = static_cast<double>(p) * static_cast<double>(p);
  const auto w = weights_from_logs(logs, "exp-p-squared");

  const auto growth = check_moderate_growth(w);
  CHECK_FALSE(growth.holds);

  const double h_grid[] = {1.0, 2.0, 4.0, 8.0, 16.0};
  const auto deriv = check_derivation_stability(w, h_grid);
  CHECK(deriv.holds);
  CHECK(deriv.constants.H == doctest::Approx(8.0));
  CHECK(deriv.constants.A == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("quasi-analytic boundary: factorial class diverges, higher converge") {
  // Terms M_{p-1}/M_p = p^{-s} exactly, so the fitted decay exponent is s.
  const auto g1 = check_non_quasianalytic(make_gevrey(1.0, 64));
  CHECK(g1.verdict == SumVerdict::diverges);
  CHECK(g1.decay_exponent == doctest::Approx(1.0).epsilon(0.02));

  const auto g15 = check_non_quasianalytic(make_gevrey(1.5, 64));
  CHECK(g15.verdict == SumVerdict::converges);
  CHECK(g15.decay_exponent == doctest::Approx(1.5).epsilon(0.02));

  const auto g2 = check_non_quasianalytic(make_gevrey(2.0, 64));
  CHECK(g2.verdict == SumVerdict::converges);
  CHECK(g2.decay_exponent == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("envelope values match hand-enumerated suprema") {
  const WeightEnvelope env(make_gevrey(1.0, 200), 100.0);
  // t = 2: max_p (p ln 2 - ln p!) peaks at p in {1, 2} with value ln 2.
  CHECK(env.value(2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // t = 6: peak at p in {5, 6}, value ln(6^6 / 720) = ln 64.8.
  CHECK(env.value(6.0) == doctest::Approx(std::log(64.8)).epsilon(1e-12));
  CHECK(env.argmax_order(6.0) >= 5);
  CHECK(env.argmax_order(6.0) <= 6);
  // Small t: the p = 0 term wins and the envelope is exactly zero.
  CHECK(env.value(0.5) == 0.0);
  CHECK(env.argmax_interior(50.0));

  // Interpolated path stays close to the exact scan inside the table:
  // piecewise-linear in log t, so the absolute defect is a few 1e-4.
  for (double t : {0.01, 0.7, 3.3, 17.0, 42.0, 99.0})
    CHECK(std::abs(env(t) - env.value(t)) <= 2e-3);
}

TEST_CASE("envelope argmax saturates when the sequence is too short") {
  const WeightEnvelope env(make_gevrey(2.0, 5), 50.0);
  CHECK_FALSE(env.argmax_interior(1e5));
}

TEST_CASE("moment recovery is exact on log-convex sequences") {
  const WeightEnvelope env(make_gevrey(2.0, 200), 4000.0);
  const auto rec = env.recover_log_moments(25);
  const auto oracle = gevrey_logs_by_summation(2.0, 25);
  for (std::size_t p = 0; p <= 25; ++p)
    CHECK(std::abs(rec[p] - oracle[p]) <= 1e-9);
}

TEST_CASE("moment recovery flags orders whose dual segment leaves the table") {
  // t_max = 4000 covers the owning segments of small orders only: order p
  // owns t near M_{p+1}/M_p = (p+1)^2, so p = 25 needs t ~ 676 (inside)
  // while p = 80 needs t ~ 6561 (outside).
  const WeightEnvelope env(make_gevrey(2.0, 200), 4000.0);
  const auto rec = env.recover_moments(80);
  const auto oracle = gevrey_logs_by_summation(2.0, 80);
  for (std::size_t p = 0; p <= 25; ++p) {
    CHECK(rec.reliable[p]);
    CHECK(std::abs(rec.log_m[p] - oracle[p]) <= 1e-9);
  }
  CHECK_FALSE(rec.reliable[80]);
  // The clipped recovery undershoots the true moment.
  CHECK(rec.log_m[80] < oracle[80] - 1.0);
}

TEST_CASE("moment recovery returns the convex minorant otherwise") {
  // (1, 2, 3) regularises to (1, sqrt(3), 3): the recovered middle moment
  // must land on sqrt(3), far from the original 2.
  const double vals[] = {1.0, 2.0, 3.0};
  const WeightEnvelope env(weights_from_values(vals, "non-convex"), 50.0);
  const auto rec = env.recover_log_moments(2);
  CHECK(rec[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rec[1] == doctest::Approx(0.5 * std::log(3.0)).epsilon(0.01));
  CHECK(std::abs(rec[1] - std::log(2.0)) > 1e-3);
  CHECK(rec[2] == doctest::Approx(std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("doubling inequality certified for factorial-squared weights") {
  const WeightEnvelope env(make_gevrey(2.0, 600), 1000.0);
  const auto rep = check_moment_doubling(env, 4.0, 1.0);
  CHECK(rep.holds);
  CHECK(rep.min_margin >= -1e-9);

  // H = 1 cannot absorb the factor 2: the margin is ln A - sup N(t) < 0.
  const auto bad = check_moment_doubling(env, 1.0, 1.0);
  CHECK_FALSE(bad.holds);
}

TEST_CASE("doubling check refuses truncated sequences") {
  const WeightEnvelope env(make_gevrey(2.0, 5), 1000.0);
  CHECK_THROWS_AS(check_moment_doubling(env, 4.0, 1.0), Error);
}

TEST_CASE("operator coefficients validated against the weight reciprocal") {
  const auto g2 = make_gevrey(2.0, 64);

  // a_k = 1/(k!)^2 saturates the bound exactly at every order.
  std::vector<std::pair<int, double>> tight;
  for (int k = 0; k <= 8; ++k)
    tight.emplace_back(k, std::exp(-2.0 * std::lgamma(k + 1.0)));
  const auto ok = validate_ultradiff_coefficients(g2, tight, 1.0, 1.0);
  CHECK(ok.admissible);
  CHECK(std::abs(ok.worst_margin) <= 1e-9);
  CHECK(ok.minimal_c == doctest::Approx(1.0).epsilon(1e-9));

  // Flat coefficients blow past 1/M_k immediately; the deepest violation
  // sits at the top order and the minimal c equals (5!)^2.
  std::vector<std::pair<int, double>> flat;
  for (int k = 0; k <= 5; ++k) flat.emplace_back(k, 1.0);
  const auto bad = validate_ultradiff_coefficients(g2, flat, 1.0, 1.0);
  CHECK_FALSE(bad.admissible);
  CHECK(bad.worst_order == 5);
  CHECK(bad.minimal_c == doctest::Approx(14400.0).epsilon(1e-9));

  // Strictly faster decay leaves room: the minimal c for 1/(k!)^2.5 at
  // h = 1/2 peaks at k = 3 and 4 jointly, value 8/sqrt(6).
  std::vector<std::pair<int, double>> fast;
  for (int k = 0; k <= 12; ++k)
    fast.emplace_back(k, std::exp(-2.5 * std::lgamma(k + 1.0)));
  const auto scan = validate_ultradiff_coefficients(g2, fast, 0.5, 1.0);
  CHECK_FALSE(scan.admissible);
  CHECK(scan.minimal_c == doctest::Approx(8.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(validate_ultradiff_coefficients(g2, fast, 0.5, scan.minimal_c * (1 + 1e-9))
            .admissible);

  // Zero coefficients never constrain; orders beyond the sequence do.
  const std::pair<int, double> zeros[] = {{0, 0.0}, {3, 0.0}};
  const auto z = validate_ultradiff_coefficients(g2, zeros, 1.0, 1.0);
  CHECK(z.admissible);
  CHECK(z.minimal_c == 0.0);
  const std::pair<int, double> deep[] = {{100, 1e-300}};
  CHECK_THROWS_AS(validate_ultradiff_coefficients(g2, deep, 1.0, 1.0), Error);
}
