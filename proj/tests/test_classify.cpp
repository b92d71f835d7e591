#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "ultrareg/classify.hpp"
#include "ultrareg/config.hpp"
#include "ultrareg/net.hpp"
#include "ultrareg/weights.hpp"

using namespace ultrareg;
using std::numbers::pi;

namespace {

bool near(double x, double want, double tol) {
  return std::abs(x - want) <= tol;
}

const Grid& delta_grid() {
  static Grid g = grid_1d(-0.4, 0.8 / 1024.0, 1024);
  return g;
}

const Grid& wave_grid() {
  static Grid g = grid_1d(-pi, 2.0 * pi / 1024.0, 1024);
  return g;
}

Net delta_net(const Grid& g, double at = 0.0) {
  std::vector<SingularTerm> t{{.kind = SingularTerm::Kind::delta,
                               .point = {at, 0.0}}};
  return mollify(g, default_ladder(), t, {});
}

const UltraReport& delta_report() {
  static UltraReport r = classify_membership(
      fit_exponents(scan(delta_net(delta_grid()))), make_gevrey(2.0));
  return r;
}

Net wave_net(double amp320) {
  return embed_constant(
      wave_grid(), default_ladder(),
      [amp320](double x) {
        return std::complex<double>(
            std::cos(x) + amp320 * std::cos(320.0 * x), 0.0);
      },
      SupportKind::periodic_full, "two-mode pair");
}

}  // namespace

TEST_CASE("derivative scan tabulates per-order sups over the ladder") {
  const Net d = delta_net(delta_grid());
  const DerivativeScan s = scan(d);

  CHECK(s.max_order == defaults::kScanOrderMax);
  CHECK(s.sup.size() == std::size_t(defaults::kScanOrderMax) + 1);
  CHECK(s.eps == default_ladder().all());
  for (const auto& row : s.sup) CHECK(row.size() == 10);

  // Row 0 is the net itself; higher rows take the spectral derivative.
  for (int j = 0; j < d.rungs(); ++j) {
    CHECK(s.sup[0][std::size_t(j)] ==
          doctest::Approx(sup_norm(d, j)).epsilon(1e-14));
    CHECK(s.sup[1][std::size_t(j)] > s.sup[0][std::size_t(j)]);
  }

  CHECK_THROWS_AS(scan(d, {0, {}}), Error);
  CHECK_THROWS_AS(scan(d, {tol::kMaxDerivTotal + 1, {}}), Error);
}

TEST_CASE("region scans localize the table to a plateau") {
  const Net d = delta_net(delta_grid());
  const DerivativeScan global = scan(d, {4, {}});

  // A plateau that holds every extremum of the fit rungs reproduces the
  // global fit exactly: the sup is attained inside it.
  const ExponentFit fg = fit_exponents(global);
  const ExponentFit fn =
      fit_exponents(scan(d, {4, Window{{0.0}, 0.2, 1.5}}));
  for (std::size_t m = 0; m < fg.rows.size(); ++m) {
    CHECK(near(fn.rows[m].slope, fg.rows[m].slope, 1e-9));
    CHECK(near(fn.rows[m].intercept, fg.rows[m].intercept, 1e-9));
  }

  // Ten mollifier widths away the raw samples vanish identically and the
  // derivative rows only see the aliasing skirt of the sharpest rungs
  // (measured at most 3.2e-4 of the global sup, order 3, finest rung).
  const DerivativeScan away = scan(d, {4, Window{{0.2}, 0.1, 1.5}});
  for (std::size_t j = 5; j < 10; ++j) {
    CHECK(away.sup[0][j] == 0.0);
    for (std::size_t m = 1; m <= 4; ++m)
      CHECK(away.sup[m][j] < 1e-3 * global.sup[m][j]);
  }

  CHECK_THROWS_AS(scan(d, {4, Window{{0.0, 0.0}, 0.1, 1.5}}), Error);
  CHECK_THROWS_AS(scan(d, {4, Window{{0.0}, -0.1, 1.5}}), Error);
  CHECK_THROWS_AS(scan(d, {4, Window{{0.39}, 0.1, 1.5}}), Error);
  // A sliver between grid points holds no cells.
  CHECK_THROWS_AS(scan(d, {4, Window{{0.8 / 2048.0}, 1e-5, 1.5}}), Error);
}

TEST_CASE("mixed partials enter 2-D scans by total order") {
  const Grid sq = grid_2d(-0.64, 1.28 / 256.0, 256, -0.64, 1.28 / 256.0, 256);
  const double k0 = 2.0 * pi / 1.28;

  // cos(k0 x) cos(2 k0 y): every mixed partial has sup k0^i (2 k0)^j, so
  // the order-m row must pick the all-y branch (2 k0)^m. Band-limited, so
  // the spectral derivative is exact.
  const Net waves = embed_constant(
      sq, default_ladder(),
      [k0](double x, double y) {
        return std::complex<double>(std::cos(k0 * x) * std::cos(2.0 * k0 * y),
                                    0.0);
      },
      SupportKind::periodic_full, "2d waves");
  const DerivativeScan s = scan(waves, {3, {}});
  for (int m = 0; m <= 3; ++m)
    for (std::size_t j = 0; j < 10; ++j)
      CHECK(s.sup[std::size_t(m)][j] ==
            doctest::Approx(std::pow(2.0 * k0, m)).epsilon(1e-9));
  CHECK(classify_membership(fit_exponents(s)).verdict ==
        RegularityClass::zero());

  // The 2-D product delta resolves its first orders on the canonical
  // square; at rung 9 the bump spans only 4 cells, so higher orders
  // saturate and are not asserted here.
  const ExponentFit fd = fit_exponents(scan(delta_net(sq), {1, {}}));
  CHECK(near(fd.rows[0].slope, 2.0, 0.05));
  CHECK(near(fd.rows[1].slope, 3.0, 0.1));
}

TEST_CASE("mollified delta grows one reciprocal power per derivative") {
  const UltraReport& r = delta_report();

  // Frozen from the pinned geometry (slopes to 4 decimals: 1.0000 1.9997
  // 2.9856 4.0063 4.9668 5.9995 6.8703). The m+1 law is certified within
  // +-0.05 through order 4; order 6 sags to 6.87 as the sharpest rungs
  // run out of samples.
  REQUIRE(r.fit.rows.size() == 7);
  CHECK(r.fit.first_rung == 5);
  CHECK(r.fit.rung_count == 5);
  for (int m = 0; m <= 4; ++m)
    CHECK(near(r.fit.rows[std::size_t(m)].slope, m + 1.0, 0.05));
  CHECK(near(r.fit.rows[5].slope, 5.9995, 5e-3));
  CHECK(near(r.fit.rows[6].slope, 6.8703, 5e-3));

  CHECK(r.verdict.kind == RegKind::affine);
  CHECK(near(r.verdict.a, 0.9854, 2e-3));
  CHECK(near(r.verdict.b, 1.0192, 2e-3));
  CHECK_FALSE(r.null_up_to_probe);

  REQUIRE(r.ultra.has_value());
  CHECK(r.ultra->pass);
  CHECK(near(r.ultra->log_c_hat, 0.4687, 2e-3));
  CHECK(near(r.ultra->margin, -0.3308, 2e-3));

  const GradedBound gb = graded_bound(r);
  CHECK(gb.log_c == r.ultra->log_c_hat);
  CHECK(gb.profile == r.verdict);
}

TEST_CASE("products add exponent ladders and derivatives shift them") {
  const Net d = delta_net(delta_grid());

  // delta * delta: order-m exponent m + 2 (sum of the factors' profiles).
  // Measured within 0.022 of the law on the pinned geometry.
  const ExponentFit fp = fit_exponents(scan(multiply(d, d), {4, {}}));
  for (int m = 0; m <= 4; ++m)
    CHECK(near(fp.rows[std::size_t(m)].slope, m + 2.0, 0.1));

  // d/dx delta: row m equals the delta's row m+1 (measured gap < 0.01).
  const ExponentFit fd = fit_exponents(scan(derivative(d, MultiIndex::d1(1)),
                                            {5, {}}));
  const ExponentFit& f0 = delta_report().fit;
  for (int m = 0; m <= 5; ++m)
    CHECK(near(fd.rows[std::size_t(m)].slope,
               f0.rows[std::size_t(m) + 1].slope, 0.01));
}

TEST_CASE("power-decay families read as null and dissolve into growth") {
  const auto ripple = [](double x, double eps) {
    const double xi = 5.0 * 2.0 * pi / 0.8;
    return std::complex<double>(std::pow(eps, 5) * std::sin(xi * x), 0.0);
  };
  const Net nul = synthesize(delta_grid(), default_ladder(), ripple,
                             SupportKind::periodic_full, "ripple");

  const UltraReport rn = classify_membership(fit_exponents(scan(nul)));
  CHECK(rn.verdict == RegularityClass::zero());
  CHECK(rn.null_up_to_probe);
  // Spectral noise bends the top row by 1.8e-5; lower rows are exact.
  for (const auto& row : rn.fit.rows) CHECK(near(row.slope, -5.0, 1e-4));

  // Adding the ripple to the delta changes nothing the fit can see:
  // measured rows agree to 4 decimals with the delta alone.
  const Net d = delta_net(delta_grid());
  const UltraReport rs = classify_membership(fit_exponents(scan(add(d, nul))),
                                             make_gevrey(2.0));
  const UltraReport& r0 = delta_report();
  for (std::size_t m = 0; m < r0.fit.rows.size(); ++m) {
    CHECK(near(rs.fit.rows[m].slope, r0.fit.rows[m].slope, 1e-3));
    CHECK(near(rs.fit.rows[m].intercept, r0.fit.rows[m].intercept, 1e-3));
  }
  CHECK(rs.verdict.kind == r0.verdict.kind);
  CHECK(near(rs.verdict.a, r0.verdict.a, 1e-6));
  CHECK(near(rs.verdict.b, r0.verdict.b, 1e-6));
  CHECK(rs.ultra->pass == r0.ultra->pass);

  // The zero net: every row null, nothing to refute membership with.
  const Net zero = embed_constant(
      delta_grid(), default_ladder(),
      [](double) { return std::complex<double>(0.0, 0.0); },
      SupportKind::compact, "zero");
  const UltraReport rz = classify_membership(fit_exponents(scan(zero)),
                                             make_gevrey(2.0));
  CHECK(rz.verdict == RegularityClass::zero());
  CHECK(rz.null_up_to_probe);
  for (const auto& row : rz.fit.rows) CHECK(row.null_row);
  REQUIRE(rz.ultra.has_value());
  CHECK(rz.ultra->pass);
  CHECK(rz.ultra->log_c_hat == 0.0);
}

TEST_CASE("eps growth without derivative growth reads bounded") {
  SmoothBump bump(1.5);
  const Net u = synthesize(
      delta_grid(), default_ladder(),
      [&bump](double x, double eps) {
        return std::complex<double>(bump.value(x / 0.3) / eps, 0.0);
      },
      SupportKind::compact, "eps^-1 profile");
  const UltraReport r = classify_membership(fit_exponents(scan(u)));
  CHECK(r.verdict.kind == RegKind::bounded);
  CHECK(near(r.verdict.b, 1.0, 1e-3));
}

TEST_CASE("fixed smooth functions pass the budget of their own grade") {
  const Net s = embed_constant(
      wave_grid(), default_ladder(),
      [](double x) { return std::complex<double>(std::sin(x), 0.0); },
      SupportKind::periodic_full, "sin");
  const auto g1 = make_gevrey(1.0);
  const UltraReport rs = classify_membership(fit_exponents(scan(s)), g1);
  CHECK(rs.verdict == RegularityClass::zero());
  REQUIRE(rs.ultra.has_value());
  CHECK(rs.ultra->pass);
  CHECK(near(rs.ultra->margin, -0.6036, 5e-3));
  const CrosscheckReport cs = denjoy_carleman_crosscheck(s, g1);
  CHECK(cs.net_route);
  CHECK(cs.direct_route);
  CHECK(cs.agree);

  // The sigma=2 bump against its own grade is the borderline member:
  // measured margin -0.077, deterministic but tight, because
  // exp(-1/(1-t^2)) is exactly Gevrey-2. One grade up the slack opens.
  SmoothBump bump(2.0);
  const Net b = embed_constant(
      wave_grid(), default_ladder(),
      [&bump](double x) { return std::complex<double>(bump.value(x), 0.0); },
      SupportKind::compact, "bump");
  const ExponentFit fb = fit_exponents(scan(b));
  const UltraReport r2 = classify_membership(fb, make_gevrey(2.0));
  const UltraReport r3 = classify_membership(fb, make_gevrey(3.0));
  CHECK(r2.verdict == RegularityClass::zero());
  CHECK(r2.ultra->pass);
  CHECK(near(r2.ultra->margin, -0.0771, 5e-3));
  CHECK(r3.ultra->pass);
  CHECK(near(r3.ultra->margin, -0.5404, 5e-3));
  CHECK(r3.ultra->margin < r2.ultra->margin);
  const CrosscheckReport cb = denjoy_carleman_crosscheck(b, make_gevrey(2.0));
  CHECK(cb.net_route);
  CHECK(cb.direct_route);
  CHECK(cb.agree);
}

TEST_CASE("a faint high mode breaks the budget at high order only") {
  // cos x plus 3e-7 cos(320x): classically smooth (class zero), but the
  // second mode's derivatives outgrow every gevrey-2 budget anchored at
  // the head orders. Frozen margin 0.6188 at order 6; the bracketing
  // amplitudes 2e-7 and 5e-7 stay above the 0.5 gate as well.
  const auto g2 = make_gevrey(2.0);
  const UltraReport r = classify_membership(fit_exponents(scan(wave_net(3e-7))),
                                            g2);
  CHECK(r.verdict == RegularityClass::zero());
  REQUIRE(r.ultra.has_value());
  CHECK_FALSE(r.ultra->pass);
  CHECK(r.ultra->worst_order == 6);
  CHECK(near(r.ultra->margin, 0.6188, 5e-3));
  CHECK(r.ultra->margin >= 0.5);

  const CrosscheckReport cc = denjoy_carleman_crosscheck(wave_net(3e-7), g2);
  CHECK_FALSE(cc.net_route);
  CHECK_FALSE(cc.direct_route);
  CHECK(cc.agree);

  for (double amp : {2e-7, 5e-7}) {
    const UltraReport rb =
        classify_membership(fit_exponents(scan(wave_net(amp))), g2);
    CHECK_FALSE(rb.ultra->pass);
    CHECK(rb.ultra->margin >= 0.5);
  }
}

TEST_CASE("crosscheck separates slice smoothness from ladder growth") {
  // The mollified delta fails the net route (its sups grow with 1/eps)
  // while any single slice is a smooth bump, so the direct route passes.
  // The disagreement is the diagnostic: the singularity lives in the eps
  // dependence, not in any one slice.
  const CrosscheckReport cc =
      denjoy_carleman_crosscheck(delta_net(delta_grid()), make_gevrey(2.0));
  CHECK_FALSE(cc.net_route);
  CHECK(cc.direct_route);
  CHECK_FALSE(cc.agree);
}

TEST_CASE("singular support finds the core and clears smooth fields") {
  const auto g2 = make_gevrey(2.0);
  const RegularityClass target = RegularityClass::bounded(0.0);

  // Every window within 1.5 radii of the core fails; the first passing
  // center sits 2 radii out. Grid-exact centers, frozen.
  const auto ss = singular_support(delta_net(delta_grid()), g2, target, {});
  REQUIRE(ss.size() == 7);
  for (std::size_t k = 0; k < 7; ++k)
    CHECK(near(ss[k], (double(k) - 3.0) * 0.00625, 1e-12));

  const Net s = embed_constant(
      wave_grid(), default_ladder(),
      [](double x) { return std::complex<double>(std::sin(x), 0.0); },
      SupportKind::periodic_full, "sin");
  CHECK(singular_support(s, g2, target, {}).empty());
}

TEST_CASE("sweeps separate a point singularity from a smooth companion") {
  // delta at -1 next to a compact bump at +1: the sweep must flag the
  // core's neighbourhood and nothing on the bump, including its support
  // edges, where the content is faint but genuinely smooth.
  const Grid wide = grid_1d(-2.0, 4.0 / 1024.0, 1024);
  SmoothBump prof(2.0);
  const Net mix = add(delta_net(wide, -1.0),
                      embed_constant(
                          wide, default_ladder(),
                          [&prof](double x) {
                            return std::complex<double>(
                                prof.value((x - 1.0) / 0.5), 0.0);
                          },
                          SupportKind::compact, "offset bump"));
  const auto ss = singular_support(mix, make_gevrey(2.0),
                                   RegularityClass::bounded(0.0), {});
  REQUIRE(ss.size() == 5);
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(near(ss[k], -1.0 + (double(k) - 2.0) * 0.03125, 1e-12));
}

TEST_CASE("first derivatives neither create nor move singular support") {
  std::vector<SingularTerm> t{{.kind = SingularTerm::Kind::heaviside,
                               .point = {0.0, 0.0}}};
  const Net u = mollify(delta_grid(), default_ladder(), t, {});
  const DiffTerm ddx{MultiIndex::d1(1), {1.0, 0.0}, nullptr};

  const PseudolocalityReport r = pseudolocality_probe(
      {&ddx, 1}, u, make_gevrey(2.0), RegularityClass::bounded(0.0), {});
  CHECK(r.forward);
  CHECK(r.reverse);
  REQUIRE(r.singular_u.size() == 5);
  CHECK(r.singular_pu == r.singular_u);
  for (double x : r.singular_u) CHECK(std::abs(x) <= 0.01875 + 1e-12);
}

TEST_CASE("classification guards refuse misuse") {
  const Net d = delta_net(delta_grid());

  // Too few small-scale rungs for the regression.
  DerivativeScan stub;
  stub.max_order = 1;
  stub.eps = {0.3, 0.2, 0.1, 0.05, 0.03, 0.02};
  stub.sup.assign(2, std::vector<double>(6, 1.0));
  CHECK_THROWS_AS(fit_exponents(stub), Error);

  // Weight table shorter than the scanned orders.
  const ExponentFit f = fit_exponents(scan(d));
  CHECK_THROWS_AS(classify_membership(f, make_gevrey(2.0, 4)), Error);

  // No certificate without an ultra verdict, or with a failed one.
  CHECK_THROWS_AS(graded_bound(classify_membership(f)), Error);
  const UltraReport bad =
      classify_membership(fit_exponents(scan(wave_net(3e-7))),
                          make_gevrey(2.0));
  CHECK_THROWS_AS(graded_bound(bad), Error);

  // Sweep limits: 1-D only, resolvable radius, overlapping stride.
  const Grid sq = grid_2d(-0.64, 1.28 / 256.0, 256, -0.64, 1.28 / 256.0, 256);
  const auto g2 = make_gevrey(2.0);
  const RegularityClass tgt = RegularityClass::bounded(0.0);
  CHECK_THROWS_AS(singular_support(delta_net(sq), g2, tgt, {}), Error);
  CHECK_THROWS_AS(singular_support(d, g2, tgt, {.radius_cells = 4}), Error);
  CHECK_THROWS_AS(
      singular_support(d, g2, tgt, {.radius_cells = 16, .stride_cells = 17}),
      Error);
  CHECK_THROWS_AS(singular_support(d, g2, tgt, {.max_order = 0}), Error);

  CHECK_THROWS_AS(pseudolocality_probe({}, d, g2, tgt, {}), Error);
}
