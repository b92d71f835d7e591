#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ultrareg/regsets.hpp"

using namespace ultrareg;

TEST_CASE("family partial order") {
  const auto z = RegularityClass::zero();
  const auto b1 = RegularityClass::bounded(1.0);
  const auto af = RegularityClass::affine(1.0, 1.0);
  const auto f = RegularityClass::full();

  CHECK(b1.contains(z));
  CHECK(af.contains(b1));
  CHECK(af.contains(z));
  CHECK(f.contains(af));
  CHECK_FALSE(z.contains(b1));
  CHECK_FALSE(b1.contains(af));
  CHECK_FALSE(af.contains(f));
  CHECK_FALSE(RegularityClass::affine(1.0, 0.5).contains(b1));
  CHECK(RegularityClass::affine(2.0, 1.0).contains(RegularityClass::affine(1.0, 1.0)));
}

TEST_CASE("shift closure keeps profiles admissible") {
  // Witness validity: the returned class must dominate m -> N(m+k) + k'.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ua(0.0, 3.0);
  std::uniform_int_distribution<int> uk(0, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = RegularityClass::affine(ua(rng), ua(rng));
    const int k = uk(rng);
    const double boost = ua(rng);
    const auto res = closure_under_shift(c, k, boost);
    CHECK_FALSE(res.escalated);
    for (int m = 0; m <= 10; ++m)
      CHECK(res.result.bound_at(m) >= c.bound_at(m + k) + boost - 1e-12);
  }
}

TEST_CASE("shift closure escalates the zero family on positive boost") {
  const auto kept = closure_under_shift(RegularityClass::zero(), 3, 0.0);
  CHECK(kept.result == RegularityClass::zero());
  CHECK_FALSE(kept.escalated);

  const auto moved = closure_under_shift(RegularityClass::zero(), 3, 1.5);
  CHECK(moved.result == RegularityClass::bounded(1.5));
  CHECK(moved.escalated);

  const auto b = closure_under_shift(RegularityClass::bounded(2.0), 4, 0.5);
  CHECK(b.result == RegularityClass::bounded(2.5));
  CHECK_FALSE(b.escalated);
}

TEST_CASE("max and sum closures dominate every split") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ua(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c1 = RegularityClass::affine(ua(rng), ua(rng));
    const auto c2 = RegularityClass::bounded(ua(rng));
    const auto mx = closure_under_max(c1, c2);
    const auto sm = closure_under_sum(c1, c2);
    for (int m = 0; m <= 10; ++m)
      CHECK(mx.bound_at(m) >= std::max(c1.bound_at(m), c2.bound_at(m)) - 1e-12);
    // Sum closure bounds N1(l1) + N2(l2) at order l1 + l2 for every split.
    for (int l1 = 0; l1 <= 10; ++l1)
      for (int l2 = 0; l2 <= 10; ++l2)
        CHECK(sm.bound_at(l1 + l2) >=
              c1.bound_at(l1) + c2.bound_at(l2) - 1e-12);
  }
  // Exact parameter arithmetic on frozen pairs: slopes by max, offsets add.
  const auto s = closure_under_sum(RegularityClass::affine(1.0, 0.5),
                                   RegularityClass::affine(2.0, 0.25));
  CHECK(s == RegularityClass::affine(2.0, 0.75));
  const auto t = closure_under_sum(RegularityClass::affine(1.0, 0.0),
                                   RegularityClass::affine(2.0, 1.0));
  CHECK(t == RegularityClass::affine(2.0, 1.0));
  for (int l1 = 0; l1 <= 64; ++l1)
    for (int l2 = 0; l2 + l1 <= 64; ++l2)
      CHECK(t.bound_at(l1 + l2) >=
            1.0 * l1 + (2.0 * l2 + 1.0) - 1e-12);
  CHECK(closure_under_max(RegularityClass::full(), RegularityClass::zero()) ==
        RegularityClass::full());
}

TEST_CASE("series stability: order-independent profiles contract") {
  // Geometric limit is exact in floating point for h = 1/2.
  const auto rep =
      check_series_stability(RegularityClass::bounded(1.0), 0.5, 0.01);
  CHECK(rep.verdict == StabilityVerdict::holds);
  CHECK(rep.ratio == 0.5);
  CHECK(std::abs(rep.limit - 2.0) <= 1e-12);
  REQUIRE(rep.n_star.size() == 1);
  CHECK(rep.n_star[0] == 1.0);

  const auto z = check_series_stability(RegularityClass::zero(), 0.99, 0.5);
  CHECK(z.verdict == StabilityVerdict::holds);
  CHECK(z.limit == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("series stability: grid witness dominates truncated sums") {
  const RegularityClass cls = RegularityClass::bounded(1.0);
  const double grid[] = {0.3, 0.1, 0.01};
  const auto rep = check_series_stability(cls, 0.5, grid, 3);
  REQUIRE(rep.verdict == StabilityVerdict::holds);
  CHECK(rep.ratio == 0.5);
  CHECK(std::abs(rep.limit - 2.0) <= 1e-12);
  REQUIRE(rep.n_star.size() == 4);
  for (double ns : rep.n_star) CHECK(ns == 1.0);

  // Oracle: the witness (L, N*) really caps the truncated sums, with a
  // geometric remainder closing the tail.
  for (double eps : grid) {
    for (int m = 0; m <= 3; ++m) {
      double partial = 0.0;
      for (int k = 0; k <= 60; ++k)
        partial += std::pow(0.5, k) * std::pow(eps, -cls.bound_at(k + m));
      const double tail =
          std::pow(0.5, 61) * std::pow(eps, -cls.bound_at(0)) / (1.0 - 0.5);
      CHECK(partial + tail <=
            rep.limit * std::pow(eps, -rep.n_star[(std::size_t)m]) + 1e-9);
    }
  }

  // Affine profile on a grid bounded away from zero still contracts; the
  // worst ratio comes from the smallest scale.
  const RegularityClass aff = RegularityClass::affine(1.0, 0.0);
  const double grid2[] = {0.9, 0.5};
  const auto ok = check_series_stability(aff, 0.1, grid2, 2);
  REQUIRE(ok.verdict == StabilityVerdict::holds);
  CHECK(ok.worst_eps == 0.5);
  CHECK(ok.ratio == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ok.limit == doctest::Approx(1.25).epsilon(1e-12));
  REQUIRE(ok.n_star.size() == 3);
  for (int m = 0; m <= 2; ++m) {
    CHECK(ok.n_star[(std::size_t)m] == doctest::Approx((double)m));
    for (double eps : grid2) {
      double partial = 0.0;
      for (int k = 0; k <= 40; ++k)
        partial += std::pow(0.1, k) * std::pow(eps, -aff.bound_at(k + m));
      CHECK(partial <= ok.limit * std::pow(eps, -ok.n_star[(std::size_t)m]) +
                           1e-9);
    }
  }
}

TEST_CASE("series stability: growing profiles blow up at small eps") {
  // ratio = h * eps^{-a} = 0.5 * 100 = 50 at eps = 0.01, a = 1.
  const auto rep =
      check_series_stability(RegularityClass::affine(1.0, 0.0), 0.5, 0.01);
  CHECK(rep.verdict == StabilityVerdict::fails);
  CHECK(rep.ratio == doctest::Approx(50.0).epsilon(1e-12));

  // Same class summable closer to eps = 1.
  const auto ok =
      check_series_stability(RegularityClass::affine(1.0, 0.0), 0.5, 0.9);
  CHECK(ok.verdict == StabilityVerdict::holds);
  CHECK(ok.ratio == doctest::Approx(0.5 / 0.9).epsilon(1e-12));

  const auto full = check_series_stability(RegularityClass::full(), 0.5, 0.01);
  CHECK(full.verdict == StabilityVerdict::inconclusive);
}

TEST_CASE("exponent tables pick the tightest family") {
  const int orders[] = {0, 1, 2, 3};

  const double flat[] = {0.02, 0.05, -0.01, 0.03};
  CHECK(classify_exponents(orders, flat) == RegularityClass::zero());

  const double capped[] = {1.0, 1.02, 0.98, 1.05};
  const auto b = classify_exponents(orders, capped);
  CHECK(b.kind == RegKind::bounded);
  CHECK(b.b == doctest::Approx(1.05));

  // Unit slope from offset 1 at order zero.
  const double line[] = {1.0, 2.0, 3.0, 4.0};
  const auto af = classify_exponents(orders, line);
  CHECK(af.kind == RegKind::affine);
  CHECK(af.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(af.b == doctest::Approx(1.0).epsilon(1e-9));

  const double wild[] = {0.0, 2.0, 0.0, 3.0};
  CHECK(classify_exponents(orders, wild) == RegularityClass::full());
}

TEST_CASE("random affine tables are recovered and contained") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uslope(0.3, 2.0);
  std::uniform_real_distribution<double> uoff(0.0, 2.0);
  const int orders[] = {0, 1, 2, 3, 4, 5, 6};
  for (int trial = 0; trial < 100; ++trial) {
    const double a = uslope(rng), b = uoff(rng);
    std::vector<double> exps;
    for (int m : orders) exps.push_back(a * m + b);
    const auto got = classify_exponents(orders, exps);
    REQUIRE(got.kind == RegKind::affine);
    CHECK(got.a == doctest::Approx(a).epsilon(1e-9));
    CHECK(got.b == doctest::Approx(b).epsilon(1e-7));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(RegularityClass::bounded(-1.0), Error);
  CHECK_THROWS_AS(RegularityClass::affine(-0.5, 0.0), Error);
  CHECK_THROWS_AS(closure_under_shift(RegularityClass::zero(), -1, 0.0), Error);
  CHECK_THROWS_AS(
      check_series_stability(RegularityClass::zero(), 0.0, 0.5), Error);
  CHECK_THROWS_AS(
      check_series_stability(RegularityClass::zero(), 0.5, 1.5), Error);
  const int orders[] = {0, 0};
  const double exps[] = {1.0, 1.0};
  CHECK_THROWS_AS(classify_exponents(orders, exps), Error);
}
