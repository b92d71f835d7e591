#include "ultrareg/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "ultrareg/error.hpp"

namespace ultrareg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cell indices of a window's plateau (per axis |x - c| <= radius/2).
// The plateau must sit inside the domain; scans do not wrap.
std::vector<std::size_t> plateau_cells(const Window& w, const Grid& g) {
  if (w.center.size() != g.dim())
    throw Error(ErrorKind::parameter, "region/grid dimension mismatch");
  if (!(w.radius > 0.0))
    throw Error(ErrorKind::parameter, "region radius must be positive");
  const double half = 0.5 * w.radius;
  for (std::size_t d = 0; d < g.dim(); ++d) {
    const Axis& ax = g.axes[d];
    if (w.center[d] - half < ax.origin ||
        w.center[d] + half > ax.origin + ax.length() - ax.dx)
      throw Error(ErrorKind::geometry, "region plateau leaves the domain");
  }
  std::vector<std::size_t> cells;
  if (g.dim() == 1) {
    const Axis& ax = g.axes[0];
    for (std::size_t i = 0; i < ax.n; ++i)
      if (std::abs(ax.point(i) - w.center[0]) <= half) cells.push_back(i);
  } else {
    const Axis& a0 = g.axes[0];
    const Axis& a1 = g.axes[1];
    for (std::size_t i = 0; i < a0.n; ++i) {
      if (std::abs(a0.point(i) - w.center[0]) > half) continue;
      for (std::size_t j = 0; j < a1.n; ++j)
        if (std::abs(a1.point(j) - w.center[1]) <= half)
          cells.push_back(g.index(i, j));
    }
  }
  if (cells.empty())
    throw Error(ErrorKind::parameter, "region plateau contains no grid cells");
  return cells;
}

double sup_over(const Net& u, std::size_t rung,
                const std::vector<std::size_t>& cells) {
  const auto& s = u.slice(rung);
  double sup = 0.0;
  if (cells.empty()) {
    for (const auto& z : s) sup = std::max(sup, std::abs(z));
  } else {
    for (std::size_t i : cells) sup = std::max(sup, std::abs(s[i]));
  }
  return sup;
}

void fill_row(DerivativeScan& s, const Net& d, int m,
              const std::vector<std::size_t>& cells) {
  for (std::size_t j = 0; j < static_cast<std::size_t>(d.rungs()); ++j)
    s.sup[static_cast<std::size_t>(m)][j] =
        std::max(s.sup[static_cast<std::size_t>(m)][j], sup_over(d, j, cells));
}

// Head/tail consistency rule on per-order constant estimates c_m.
UltraVerdict head_tail(const std::vector<std::pair<int, double>>& cs) {
  UltraVerdict v;
  double lc = -kInf, head = -kInf;
  for (const auto& [m, c] : cs) {
    lc = std::max(lc, c);
    if (m <= tol::kHeadOrders) head = std::max(head, c);
  }
  if (!cs.empty()) v.log_c_hat = lc;
  // No low-order rows: nothing to anchor the constant, cannot refute.
  if (head == -kInf) return v;
  // A unit constant is always admissible in the budget, so heads below the
  // neutral scale are promoted to it. Without the floor, data of tiny
  // amplitude (cutoff tails, support edges) anchors the constant absurdly
  // low and the climb back toward order one reads as a failure.
  head = std::max(head, 0.0);
  const double thr =
      std::max(tol::kHeadFactor * head, head + tol::kHeadSlack);
  double worst = -kInf;
  int worder = -1;
  for (const auto& [m, c] : cs) {
    if (m <= tol::kHeadOrders) continue;
    if (c - thr > worst) {
      worst = c - thr;
      worder = m;
    }
  }
  if (worder < 0) return v;
  v.margin = worst;
  v.worst_order = worder;
  v.pass = worst <= 0.0;
  return v;
}

UltraReport classify_impl(const ExponentFit& fit, const WeightSequence* mw) {
  if (fit.rows.empty())
    throw Error(ErrorKind::parameter, "empty exponent fit");
  UltraReport r;
  r.fit = fit;

  std::vector<int> orders;
  std::vector<double> slopes;
  for (std::size_t m = 0; m < fit.rows.size(); ++m) {
    if (fit.rows[m].null_row) continue;
    orders.push_back(static_cast<int>(m));
    slopes.push_back(fit.rows[m].slope);
  }

  if (orders.empty()) {
    r.verdict = RegularityClass::zero();
  } else if (orders.size() == 1) {
    r.verdict = slopes[0] <= tol::kZeroSlope
                    ? RegularityClass::zero()
                    : RegularityClass::bounded(slopes[0]);
  } else {
    r.verdict = classify_exponents(orders, slopes);
  }

  const std::size_t probe = std::min<std::size_t>(
      fit.rows.size() - 1, static_cast<std::size_t>(tol::kNullProbeOrder));
  r.null_up_to_probe = true;
  for (std::size_t m = 0; m <= probe; ++m)
    if (!fit.rows[m].null_row && fit.rows[m].slope > tol::kNullDecaySlope)
      r.null_up_to_probe = false;

  if (mw != nullptr) {
    if (mw->max_order() + 1 < fit.rows.size())
      throw Error(ErrorKind::compatibility,
                  "weight sequence shorter than the scanned orders");
    std::vector<std::pair<int, double>> cs;
    for (int m : orders) {
      const double e =
          fit.rows[static_cast<std::size_t>(m)].intercept - mw->log_at(m);
      cs.emplace_back(m, e / static_cast<double>(m + 1));
    }
    r.ultra = head_tail(cs);
  }
  return r;
}

// True when every point of `inner` has a point of `outer` within `slack`.
bool within(const std::vector<double>& inner, const std::vector<double>& outer,
            double slack) {
  for (double x : inner) {
    bool hit = false;
    for (double y : outer)
      if (std::abs(x - y) <= slack) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

}  // namespace

DerivativeScan scan(const Net& u, const ScanOptions& opt) {
  if (u.rungs() == 0) throw Error(ErrorKind::parameter, "empty net");
  if (opt.max_order < 1 || opt.max_order > tol::kMaxDerivTotal)
    throw Error(ErrorKind::parameter, "scan order out of range");

  std::vector<std::size_t> cells;
  if (opt.region) cells = plateau_cells(*opt.region, u.grid);

  DerivativeScan s;
  s.max_order = opt.max_order;
  s.eps = u.ladder.all();
  s.region = opt.region;
  s.sup.assign(static_cast<std::size_t>(opt.max_order) + 1,
               std::vector<double>(u.rungs(), 0.0));

  fill_row(s, u, 0, cells);
  for (int m = 1; m <= opt.max_order; ++m) {
    if (u.grid.dim() == 1) {
      fill_row(s, derivative(u, MultiIndex::d1(m)), m, cells);
    } else {
      for (int i = 0; i <= m; ++i)
        fill_row(s, derivative(u, MultiIndex::d2(i, m - i)), m, cells);
    }
  }
  return s;
}

ExponentFit fit_exponents(const DerivativeScan& s) {
  const std::size_t count = s.eps.size();
  const std::size_t half = count / 2;
  if (half < 4)
    throw Error(ErrorKind::domain,
                "ladder too short: the fit needs at least 4 small-scale rungs");
  const std::size_t first = count - half;

  ExponentFit fit;
  fit.first_rung = static_cast<int>(first);
  fit.rung_count = static_cast<int>(half);
  fit.eps.assign(s.eps.begin() + static_cast<std::ptrdiff_t>(first),
                 s.eps.end());

  for (const auto& row : s.sup) {
    ExponentRow out;
    bool null_row = false;
    for (std::size_t j = first; j < count; ++j)
      if (row[j] <= tol::kNullSup) null_row = true;
    if (null_row) {
      out.null_row = true;
      out.slope = -kInf;
      out.intercept = -kInf;
      fit.rows.push_back(out);
      continue;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t j = first; j < count; ++j) {
      const double x = std::log(1.0 / s.eps[j]);
      const double y = std::log(row[j]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(half);
    const double den = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / n;
    out.points = static_cast<int>(half);
    for (std::size_t j = first; j < count; ++j) {
      const double x = std::log(1.0 / s.eps[j]);
      out.residual = std::max(
          out.residual,
          std::abs(std::log(row[j]) - (out.intercept + out.slope * x)));
    }
    fit.rows.push_back(out);
  }
  return fit;
}

UltraReport classify_membership(const ExponentFit& fit) {
  return classify_impl(fit, nullptr);
}

UltraReport classify_membership(const ExponentFit& fit,
                                const WeightSequence& m) {
  return classify_impl(fit, &m);
}

GradedBound graded_bound(const UltraReport& r) {
  if (!r.ultra)
    throw Error(ErrorKind::parameter, "report carries no graded verdict");
  if (!r.ultra->pass)
    throw Error(ErrorKind::domain,
                "graded membership failed; no certified bound");
  return GradedBound{r.ultra->log_c_hat, r.verdict};
}

CrosscheckReport denjoy_carleman_crosscheck(const Net& u,
                                            const WeightSequence& m) {
  CrosscheckReport rep;

  const auto report = classify_membership(fit_exponents(scan(u, {})), m);
  rep.net_route = (report.verdict.kind == RegKind::zero ||
                   report.verdict.kind == RegKind::bounded) &&
                  report.ultra && report.ultra->pass;

  // Direct route: the coarsest rung's sample stands in for the function;
  // its derivative table is tested against the weights with the same
  // head/tail rule, no ladder involved.
  Net flat = u;
  for (std::size_t j = 1; j < static_cast<std::size_t>(flat.rungs()); ++j)
    flat.slices[j] = u.slice(0);
  const auto direct = scan(flat, {});
  std::vector<std::pair<int, double>> cs;
  for (int p = 0; p <= direct.max_order; ++p) {
    const double sup = direct.sup[static_cast<std::size_t>(p)][0];
    if (sup <= tol::kNullSup) continue;
    cs.emplace_back(p, (std::log(sup) - m.log_at(p)) /
                           static_cast<double>(p + 1));
  }
  rep.direct_route = head_tail(cs).pass;
  rep.agree = rep.net_route == rep.direct_route;
  return rep;
}

namespace {

// Graded membership is scale free (lambda u belongs exactly when u does)
// but the head/tail statistic is not: a faint smooth tail anchors the head
// at its own amplitude and the climb back to the true local constant reads
// as failure. Bringing each piece to unit sup restores the invariance; a
// single scalar across rungs keeps every slope intact.
void normalize_sup(Net& p) {
  double s = 0.0;
  for (int j = 0; j < p.rungs(); ++j) s = std::max(s, sup_norm(p, j));
  if (s <= 0.0) return;
  for (int j = 0; j < p.rungs(); ++j)
    for (auto& z : p.slices[static_cast<std::size_t>(j)]) z /= s;
}

// Sliding-window sweep shared by the localization probes. When an operator
// is supplied it acts on each cut-out piece, never on the whole net: pieces
// are compact (so non-periodic inputs stay legal) and a local operator on a
// local piece cannot import the aliasing floor of a distant core.
std::vector<double> sweep_failures(const Net& u, const WeightSequence& m,
                                   const RegularityClass& target,
                                   const SingsuppOptions& opt,
                                   std::span<const DiffTerm> op) {
  if (u.grid.dim() != 1)
    throw Error(ErrorKind::parameter,
                "singular support sweeps one-dimensional nets only");
  if (opt.radius_cells < tol::kMinWindowCells)
    throw Error(ErrorKind::parameter, "window radius below the minimum");
  if (opt.stride_cells < 1 || opt.stride_cells > opt.radius_cells)
    throw Error(ErrorKind::parameter,
                "stride must keep consecutive windows overlapping");
  if (opt.max_order < 1 || opt.max_order > tol::kMaxDerivTotal)
    throw Error(ErrorKind::parameter, "scan order out of range");

  const Axis& ax = u.grid.axes[0];
  const int rc = opt.radius_cells;
  const double radius = rc * ax.dx;
  const std::vector<double> scale = sup_table(u);

  std::vector<double> bad;
  for (int i = rc; i + rc <= static_cast<int>(ax.n) - 1;
       i += opt.stride_cells) {
    const Window w{{ax.point(static_cast<std::size_t>(i))}, radius,
                   opt.window_sigma};
    Net piece = multiply_window(u, w);

    // Sensitivity floor: a piece this faint relative to the whole net is
    // below what the sweep can classify and reads as regular.
    bool faint = true;
    for (std::size_t j = 0; j < scale.size(); ++j)
      if (sup_over(piece, j, {}) > tol::kWindowRelFloor * scale[j])
        faint = false;
    if (faint) continue;

    // The operator acts on the piece and its output is localized again:
    // derivative outputs ring at the seam by expected spectral amounts,
    // and only the window's neighbourhood is under judgement anyway.
    if (!op.empty()) piece = multiply_window(apply_diffop(piece, op), w);
    normalize_sup(piece);

    const auto rep = classify_membership(
        fit_exponents(scan(piece, {opt.max_order, std::nullopt})), m);
    const bool ok =
        target.contains(rep.verdict) && rep.ultra && rep.ultra->pass;
    if (!ok) bad.push_back(w.center[0]);
  }
  return bad;
}

}  // namespace

std::vector<double> singular_support(const Net& u, const WeightSequence& m,
                                     const RegularityClass& target,
                                     const SingsuppOptions& opt) {
  return sweep_failures(u, m, target, opt, {});
}

PseudolocalityReport pseudolocality_probe(std::span<const DiffTerm> op,
                                          const Net& u,
                                          const WeightSequence& m,
                                          const RegularityClass& target,
                                          const SingsuppOptions& opt) {
  if (op.empty()) throw Error(ErrorKind::parameter, "operator has no terms");
  PseudolocalityReport rep;
  rep.singular_u = sweep_failures(u, m, target, opt, {});
  rep.singular_pu = sweep_failures(u, m, target, opt, op);
  const double slack = opt.radius_cells * u.grid.axes[0].dx;
  rep.forward = within(rep.singular_pu, rep.singular_u, slack);
  rep.reverse = within(rep.singular_u, rep.singular_pu, slack);
  return rep;
}

}  // namespace ultrareg
