#include "ultrareg/microlocal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ultrareg/error.hpp"
#include "ultrareg/mollifier.hpp"

namespace ultrareg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_angle(double t) {
  while (t <= -std::numbers::pi) t += 2.0 * std::numbers::pi;
  while (t > std::numbers::pi) t -= 2.0 * std::numbers::pi;
  return t;
}

double sector_angle(const Sector& s) {
  return std::atan2(s.center.size() > 1 ? s.center[1] : 0.0, s.center[0]);
}

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

Line regress(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (n == 1) return {0.0, y[0]};
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) return {0.0, my};
  const double s = sxy / sxx;
  return {s, my - s * mx};
}

// All cone samples of one rung inside the radial band, plus the fit
// subset: per radial bin, the loudest sample between the skim and the
// depth floor. Everything louder than the floor joins the certificate.
struct RungData {
  double eps = 0.0;
  std::vector<double> cert_r, cert_lnf;
  std::vector<double> fit_r, fit_lnf;
  double peak = -kInf;
  double peak_r = 0.0;
};

RungData collect_rung(const Spectrum& s, std::size_t rung,
                      const ConePartition& part, std::size_t sector,
                      double rho0, double xi_hi) {
  RungData out;
  out.eps = s.eps[rung];
  const cvec& slice = s.slices[rung];
  const Sector& sec = part.sectors[sector];

  std::vector<double> r_all, lnf_all;
  const double r_lo2 = rho0 * rho0 * (1.0 - 1e-12);
  const double r_hi2 = xi_hi * xi_hi * (1.0 + 1e-12);
  if (s.grid.dim() == 1) {
    const double sign = sec.center[0];
    const std::size_t n = s.grid.axes[0].n;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = s.freq(0, i);
      const double r2 = xi * xi;
      if (r2 < r_lo2 || r2 > r_hi2 || xi * sign <= 0.0) continue;
      const double m = std::abs(slice[i]);
      if (!(m > 0.0)) continue;
      r_all.push_back(std::abs(xi));
      lnf_all.push_back(std::log(m));
    }
  } else {
    const double cx = sec.center[0], cy = sec.center[1];
    const double cos_half = std::cos(std::min(sec.half_angle + 1e-9,
                                              std::numbers::pi));
    const std::size_t n0 = s.grid.axes[0].n;
    const std::size_t n1 = s.grid.axes[1].n;
    for (std::size_t i = 0; i < n0; ++i) {
      const double xi0 = s.freq(0, i);
      for (std::size_t j = 0; j < n1; ++j) {
        const double xi1 = s.freq(1, j);
        const double r2 = xi0 * xi0 + xi1 * xi1;
        if (r2 < r_lo2 || r2 > r_hi2) continue;
        const double r = std::sqrt(r2);
        if (xi0 * cx + xi1 * cy < r * cos_half) continue;
        const double m = std::abs(slice[i * n1 + j]);
        if (!(m > 0.0)) continue;
        r_all.push_back(r);
        lnf_all.push_back(std::log(m));
      }
    }
  }
  if (r_all.empty()) return out;

  const std::size_t pk = static_cast<std::size_t>(
      std::max_element(lnf_all.begin(), lnf_all.end()) - lnf_all.begin());
  out.peak = lnf_all[pk];
  out.peak_r = r_all[pk];
  const double floor = out.peak - tol::kFitDepth;
  const double skim = out.peak - tol::kFitSkim;

  // Loudest representative per radial bin; the bound is about the
  // upper envelope, not the interference pattern below it.
  const int bins = tol::kFitBins;
  std::vector<int> best(static_cast<std::size_t>(bins), -1);
  const double span = xi_hi - rho0;
  for (std::size_t i = 0; i < r_all.size(); ++i) {
    if (lnf_all[i] < floor) continue;
    out.cert_r.push_back(r_all[i]);
    out.cert_lnf.push_back(lnf_all[i]);
    if (lnf_all[i] > skim) continue;
    int b = static_cast<int>((r_all[i] - rho0) / span * bins);
    b = std::clamp(b, 0, bins - 1);
    auto& slot = best[static_cast<std::size_t>(b)];
    if (slot < 0 || lnf_all[i] > lnf_all[static_cast<std::size_t>(slot)])
      slot = static_cast<int>(i);
  }
  for (int idx : best) {
    if (idx < 0) continue;
    out.fit_r.push_back(r_all[static_cast<std::size_t>(idx)]);
    out.fit_lnf.push_back(lnf_all[static_cast<std::size_t>(idx)]);
  }
  return out;
}

struct Midline {
  double kappa = 0.0;
  double c = 0.0;
};

// One-parameter fit of ln|F| against -Mtilde(kappa |xi|): pick the
// kappa whose compensated samples ln|F| + Mtilde(kappa r) collapse to
// the thinnest band, and read the band's midline as the level c.
Midline fit_midline(const std::vector<double>& r,
                    const std::vector<double>& lnf,
                    const WeightEnvelope& env) {
  auto band = [&](double ln_kappa) {
    const double k = std::exp(ln_kappa);
    double hi = -kInf, lo = kInf;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double v = lnf[i] + env.value(k * r[i]);
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    return std::pair{hi - lo, 0.5 * (hi + lo)};
  };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(tol::kKappaLo);
  double b = std::log(tol::kKappaHi);
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = band(x1).first;
  double f2 = band(x2).first;
  for (int it = 0; it < tol::kKappaIters; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = band(x1).first;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = band(x2).first;
    }
  }
  const double lnk = 0.5 * (a + b);
  return {std::exp(lnk), band(lnk).second};
}

// One scalar across rungs keeps slopes intact; see the sweep
// normalization note in the classification sweeps.
void normalize_sup(Net& p) {
  double s = 0.0;
  for (int j = 0; j < p.rungs(); ++j) s = std::max(s, sup_norm(p, j));
  if (s <= 0.0) return;
  for (int j = 0; j < p.rungs(); ++j)
    for (auto& z : p.slices[static_cast<std::size_t>(j)]) z /= s;
}

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

ConePartition ConePartition::line() {
  ConePartition p;
  p.dim = 1;
  p.overlap = 0.0;
  p.sectors = {Sector{{1.0}, 0.0}, Sector{{-1.0}, 0.0}};
  return p;
}

ConePartition ConePartition::plane(std::size_t count) {
  if (count < 4)
    throw Error(ErrorKind::parameter,
                "a plane partition needs at least 4 sectors");
  ConePartition p;
  p.dim = 2;
  const double pitch = 2.0 * std::numbers::pi / static_cast<double>(count);
  const double half = 0.5 * pitch * (1.0 + p.overlap);
  for (std::size_t i = 0; i < count; ++i) {
    const double th = pitch * static_cast<double>(i);
    p.sectors.push_back(Sector{{std::cos(th), std::sin(th)}, half});
  }
  return p;
}

bool ConePartition::contains(std::size_t sector,
                             std::span<const double> dir) const {
  if (sector >= sectors.size())
    throw Error(ErrorKind::parameter, "sector index out of range");
  if (dir.size() != dim)
    throw Error(ErrorKind::parameter, "direction dimension mismatch");
  double n2 = 0.0;
  for (double x : dir) n2 += x * x;
  if (!(n2 > 0.0))
    throw Error(ErrorKind::parameter, "direction must be nonzero");
  const Sector& s = sectors[sector];
  if (dim == 1) return dir[0] * s.center[0] > 0.0;
  const double th = std::atan2(dir[1], dir[0]);
  return std::abs(wrap_angle(th - sector_angle(s))) <= s.half_angle + 1e-12;
}

bool ConePartition::adjacent(std::size_t i, std::size_t j) const {
  if (i >= sectors.size() || j >= sectors.size())
    throw Error(ErrorKind::parameter, "sector index out of range");
  if (i == j) return true;
  if (dim == 1) return false;
  const std::size_t d = i > j ? i - j : j - i;
  return d == 1 || d == sectors.size() - 1;
}

DecayFit fit_decay(const Spectrum& s, const ConePartition& part,
                   std::size_t sector, const WeightEnvelope& env,
                   const DecaySearchConfig& cfg) {
  if (part.dim != s.grid.dim())
    throw Error(ErrorKind::compatibility,
                "cone partition dimension does not match the spectrum");
  if (sector >= part.sectors.size())
    throw Error(ErrorKind::parameter, "sector index out of range");
  if (s.slices.empty())
    throw Error(ErrorKind::domain, "spectrum has no rungs");

  double dxi_max = 0.0;
  double ny_min = kInf;
  for (std::size_t axis = 0; axis < s.grid.dim(); ++axis) {
    dxi_max = std::max(dxi_max, s.delta_xi(axis));
    ny_min = std::min(ny_min, s.grid.axes[axis].nyquist());
  }
  const double rho0 = tol::kFitLowModes * dxi_max;
  const double xi_hi = tol::kFitHighFraction * ny_min;
  if (!(rho0 < xi_hi))
    throw Error(ErrorKind::geometry,
                "no frequency band between the low-mode floor and the "
                "alias guard");
  // The search probes Mtilde up to kKappaHi times the top of the band;
  // the table must be certified that far (mild overshoot past t_max
  // falls back to the exact scan).
  const double t_need = tol::kKappaHi * xi_hi;
  if (env.t_max() < t_need || !env.argmax_interior(t_need))
    throw Error(ErrorKind::truncation,
                "weight envelope is not certified up to the scanned "
                "frequency range");

  DecayFit out;
  out.rho0 = rho0;

  std::vector<RungData> rungs;
  std::vector<double> ln_eps, ln_kappa;
  bool any_signal = false;
  for (std::size_t j = 0; j < s.slices.size(); ++j) {
    RungData rd = collect_rung(s, j, part, sector, rho0, xi_hi);
    if (rd.peak == -kInf) continue;  // silent rung constrains nothing
    any_signal = true;
    if (static_cast<int>(rd.fit_r.size()) >= tol::kMinFitPoints) {
      Midline m = fit_midline(rd.fit_r, rd.fit_lnf, env);
      ln_eps.push_back(std::log(rd.eps));
      ln_kappa.push_back(std::log(m.kappa));
      out.points += static_cast<int>(rd.fit_r.size());
    }
    rungs.push_back(std::move(rd));
  }

  if (!any_signal) {
    // Zero spectrum in this cone: every decay budget holds.
    out.pass = true;
    out.k = tol::kKappaHi;
    out.log_c = 0.0;
    out.margin = -tol::kMaxLogPrefactor;
    return out;
  }
  if (ln_eps.empty()) {
    // Signal present but no rung offers a fittable band.
    out.pass = false;
    out.log_c = kInf;
    out.margin = kInf;
    return out;
  }

  const Line kap = regress(ln_eps, ln_kappa);

  // Spectral peak migration: when a rung's loudest sample sits clear of
  // the band floor it marks the dominant frequency. A peak wandering out
  // like eps^{-p} puts Mtilde(k eps^{a-p} |peak|) against an O(1) sample,
  // which no (k, b) budget absorbs unless a >= p.
  std::vector<double> pk_le, pk_lr;
  for (const RungData& rd : rungs)
    if (rd.peak_r > rho0 * (1.0 + tol::kPeakDetach)) {
      pk_le.push_back(std::log(rd.eps));
      pk_lr.push_back(std::log(rd.peak_r));
    }
  double peak_drift = 0.0;
  if (static_cast<int>(pk_le.size()) >= tol::kMinPeakRungs)
    peak_drift = std::max(0.0, -regress(pk_le, pk_lr).slope);
  const double p_hat = std::clamp(
      std::round(peak_drift / tol::kScaleSnap) * tol::kScaleSnap, 0.0, 2.0);

  bool shape_ok = peak_drift <= tol::kMaxScaleExponent;
  const double pin = cfg.grading == RegKind::bounded ? 0.0 : cfg.pin_a;
  if (pin >= 0.0) {
    out.a = 0.0 + std::clamp(
        std::round(pin / tol::kScaleSnap) * tol::kScaleSnap, 0.0, 2.0);
    // With the exponent pinned there is no rescaling left to absorb a
    // drifting per-rung frequency scale; a drift means no uniform k
    // exists at this exponent. The weakest rung's scale serves them all.
    if (kap.slope - out.a > tol::kKappaDrift) shape_ok = false;
    if (p_hat - out.a > 1e-9) shape_ok = false;
    double mn = kInf;
    for (std::size_t i = 0; i < ln_eps.size(); ++i)
      mn = std::min(mn, ln_kappa[i] - out.a * ln_eps[i]);
    out.k = std::exp(mn);
  } else {
    if (kap.slope > tol::kMaxScaleExponent) shape_ok = false;
    const double a_mid = 0.0 + std::clamp(
        std::round(kap.slope / tol::kScaleSnap) * tol::kScaleSnap, 0.0, 2.0);
    if (p_hat > a_mid) {
      // The migrating peak demands more rescaling than the midline drift
      // shows; certify at the peak's exponent with the weakest rung's
      // compensated scale, since the midline no longer tracks eps^a.
      out.a = p_hat;
      double mn = kInf;
      for (std::size_t i = 0; i < ln_eps.size(); ++i)
        mn = std::min(mn, ln_kappa[i] - out.a * ln_eps[i]);
      out.k = std::exp(mn);
    } else {
      out.a = a_mid;
      double ln_k = 0.0;
      for (std::size_t i = 0; i < ln_eps.size(); ++i)
        ln_k += ln_kappa[i] - out.a * ln_eps[i];
      out.k = std::exp(ln_k / static_cast<double>(ln_eps.size()));
    }
  }

  // Loss exponent: the smallest b >= 0 that brings every rung's
  // compensated residual peak under the certificate cap. A rung at
  // eps ~ 1 gains nothing from b; its residual must clear the cap on
  // its own or the fit is infeasible at any loss.
  std::vector<double> resid, ln_e_all;
  double b_need = 0.0;
  for (const RungData& rd : rungs) {
    const double scale = out.k * std::pow(rd.eps, out.a);
    double r = -kInf;
    for (std::size_t i = 0; i < rd.cert_r.size(); ++i)
      r = std::max(r, rd.cert_lnf[i] + env.value(scale * rd.cert_r[i]));
    const double le = std::log(rd.eps);
    resid.push_back(r);
    ln_e_all.push_back(le);
    const double need = r - tol::kMaxLogPrefactor;
    if (le < -1e-9) b_need = std::max(b_need, need / -le);
    else if (need > 0.0) b_need = kInf;
  }
  out.b = b_need;
  double ln_c = -kInf;
  if (std::isinf(b_need)) {
    ln_c = kInf;
  } else {
    for (std::size_t j = 0; j < resid.size(); ++j)
      ln_c = std::max(ln_c, resid[j] + out.b * ln_e_all[j]);
  }
  out.log_c = ln_c;
  out.margin = ln_c - tol::kMaxLogPrefactor;
  out.pass = shape_ok && out.k >= tol::kMinFreqScale &&
             out.b <= tol::kMaxLossExponent && out.margin <= 1e-9;
  return out;
}

bool SigmaSet::empty() const {
  return std::none_of(singular.begin(), singular.end(),
                      [](bool b) { return b; });
}

std::vector<std::size_t> SigmaSet::sectors() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < singular.size(); ++i)
    if (singular[i]) out.push_back(i);
  return out;
}

SigmaSet sigma_set(const Net& f, const WeightEnvelope& env,
                   const ConePartition& part, const DecaySearchConfig& cfg) {
  Net u = f;
  normalize_sup(u);
  const Spectrum s = fourier(u);
  SigmaSet out;
  out.singular.assign(part.sectors.size(), false);
  out.fits.reserve(part.sectors.size());
  for (std::size_t sec = 0; sec < part.sectors.size(); ++sec) {
    DecayFit fit = fit_decay(s, part, sec, env, cfg);
    out.singular[sec] = !fit.pass;
    out.fits.push_back(fit);
  }
  return out;
}

PointSigma sigma_at_point(const Net& f, std::span<const double> x0,
                          const WeightEnvelope& env, const ConePartition& part,
                          const PointOptions& opt,
                          const DecaySearchConfig& cfg) {
  if (x0.size() != f.grid.dim())
    throw Error(ErrorKind::parameter, "base point dimension mismatch");
  if (opt.radius_count < 1)
    throw Error(ErrorKind::parameter, "need at least one window radius");
  if (!(opt.shrink > 0.0 && opt.shrink < 1.0))
    throw Error(ErrorKind::parameter, "shrink factor must lie in (0, 1)");

  double dx_max = 0.0;
  for (const Axis& a : f.grid.axes) dx_max = std::max(dx_max, a.dx);

  PointSigma out;
  double cells = static_cast<double>(opt.radius_cells);
  for (int i = 0; i < opt.radius_count; ++i, cells *= opt.shrink) {
    if (cells < static_cast<double>(tol::kMinWindowCells))
      throw Error(ErrorKind::resolution,
                  "window radius below the resolvable minimum");
    out.radii.push_back(cells * dx_max);
  }
  for (double rad : out.radii) {
    Window w{std::vector<double>(x0.begin(), x0.end()), rad,
             opt.window_sigma};
    out.per_radius.push_back(sigma_set(multiply_window(f, w), env, part, cfg));
  }
  out.singular = out.per_radius.back().singular;
  for (const SigmaSet& s : out.per_radius)
    if (s.singular != out.singular) out.radii_agree = false;
  return out;
}

WaveFrontEstimate wavefront(const Net& f, const WeightEnvelope& env,
                            const ConePartition& part,
                            const WavefrontOptions& opt,
                            const DecaySearchConfig& cfg) {
  if (opt.stride_cells < 1)
    throw Error(ErrorKind::parameter, "stride must be positive");
  if (part.dim != f.grid.dim())
    throw Error(ErrorKind::compatibility,
                "cone partition dimension does not match the net");

  // Base points on stride multiples, one largest window clear of the
  // domain seam on every axis.
  const std::size_t stride = static_cast<std::size_t>(opt.stride_cells);
  const std::size_t rc = static_cast<std::size_t>(opt.point.radius_cells);
  std::vector<std::vector<std::size_t>> lattice;
  for (const Axis& a : f.grid.axes) {
    if (a.n < 2 * (rc + 2))
      throw Error(ErrorKind::geometry,
                  "window radius leaves no interior base points");
    std::vector<std::size_t> idx;
    for (std::size_t i = ((rc + 1 + stride - 1) / stride) * stride;
         i + rc + 2 <= a.n; i += stride)
      idx.push_back(i);
    if (idx.empty())
      throw Error(ErrorKind::geometry,
                  "stride leaves no interior base points");
    lattice.push_back(std::move(idx));
  }

  WaveFrontEstimate est;
  auto probe = [&](std::vector<double> p) {
    PointSigma ps = sigma_at_point(f, p, env, part, opt.point, cfg);
    for (std::size_t sec = 0; sec < ps.singular.size(); ++sec)
      if (ps.singular[sec])
        est.entries.push_back(
            WavefrontEntry{p, sec, ps.per_radius.back().fits[sec]});
    est.tested.push_back(std::move(p));
  };
  if (f.grid.dim() == 1) {
    for (std::size_t i : lattice[0]) probe({f.grid.axes[0].point(i)});
  } else {
    for (std::size_t i : lattice[0])
      for (std::size_t j : lattice[1])
        probe({f.grid.axes[0].point(i), f.grid.axes[1].point(j)});
  }
  return est;
}

std::vector<std::vector<double>> WaveFrontEstimate::point_projection() const {
  std::vector<std::vector<double>> out;
  for (const WavefrontEntry& e : entries)
    if (out.empty() || out.back() != e.point) out.push_back(e.point);
  return out;
}

std::vector<std::size_t> WaveFrontEstimate::sector_projection() const {
  std::vector<std::size_t> out;
  for (const WavefrontEntry& e : entries)
    if (std::find(out.begin(), out.end(), e.sector) == out.end())
      out.push_back(e.sector);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<bool> WaveFrontEstimate::sectors_at(std::span<const double> x0,
                                                double slack,
                                                std::size_t sector_count) const {
  std::vector<bool> out(sector_count, false);
  if (tested.empty()) return out;
  double dmin = kInf;
  for (const auto& p : tested) dmin = std::min(dmin, dist(p, x0));
  const double cap = dmin + slack + 1e-12;
  for (const WavefrontEntry& e : entries)
    if (dist(e.point, x0) <= cap && e.sector < sector_count)
      out[e.sector] = true;
  return out;
}

ConeSum cone_sum(const std::vector<bool>& s1, const std::vector<bool>& s2,
                 const ConePartition& part) {
  const std::size_t count = part.sectors.size();
  if (s1.size() != count || s2.size() != count)
    throw Error(ErrorKind::parameter,
                "sector set size does not match the partition");
  ConeSum out;
  out.sectors.assign(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    if (!s1[i]) continue;
    for (std::size_t j = 0; j < count; ++j) {
      if (!s2[j]) continue;
      const Sector& a = part.sectors[i];
      const Sector& b = part.sectors[j];
      if (part.dim == 1) {
        const double sum = a.center[0] + b.center[0];
        if (std::abs(sum) <= part.sep) {
          out.zero_hit = true;
          continue;
        }
        for (std::size_t t = 0; t < count; ++t)
          if (part.sectors[t].center[0] * sum > 0.0) out.sectors[t] = true;
        continue;
      }
      // Cancellation scan across both closed cones; the sum set itself
      // is represented by the center-ray pair.
      const double ta = sector_angle(a);
      const double tb = sector_angle(b);
      const int m = tol::kConeSumDirs;
      for (int u = 0; u < m; ++u) {
        const double fu = m == 1 ? 0.0 : 2.0 * u / (m - 1.0) - 1.0;
        for (int v = 0; v < m; ++v) {
          const double fv = m == 1 ? 0.0 : 2.0 * v / (m - 1.0) - 1.0;
          const double du = ta + fu * a.half_angle;
          const double dv = tb + fv * b.half_angle;
          // |u + v| for unit vectors du, dv.
          if (2.0 * std::abs(std::cos(0.5 * (du - dv))) <= part.sep)
            out.zero_hit = true;
        }
      }
      const double sx = a.center[0] + b.center[0];
      const double sy = a.center[1] + b.center[1];
      if (std::hypot(sx, sy) <= part.sep) continue;  // flagged above
      const std::array<double, 2> dir{sx, sy};
      for (std::size_t t = 0; t < count; ++t)
        if (part.contains(t, dir)) out.sectors[t] = true;
    }
  }
  return out;
}

namespace {

std::vector<bool> set_union(const std::vector<bool>& a,
                            const std::vector<bool>& b) {
  std::vector<bool> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] || b[i];
  return out;
}

bool contained_with_slack(const std::vector<bool>& inner,
                          const std::vector<bool>& outer,
                          const ConePartition& part) {
  for (std::size_t m = 0; m < inner.size(); ++m) {
    if (!inner[m]) continue;
    bool hit = false;
    for (std::size_t q = 0; q < outer.size() && !hit; ++q)
      hit = outer[q] && part.adjacent(m, q);
    if (!hit) return false;
  }
  return true;
}

}  // namespace

ProductCheckReport product_wavefront_check(const Net& f, const Net& g,
                                           const WeightEnvelope& env,
                                           const ConePartition& part,
                                           const WavefrontOptions& opt,
                                           const DecaySearchConfig& cfg) {
  if (!f.grid.same_geometry(g.grid))
    throw Error(ErrorKind::compatibility, "factor grids differ");
  ProductCheckReport rep;
  rep.wf_f = wavefront(f, env, part, opt, cfg);
  rep.wf_g = wavefront(g, env, part, opt, cfg);
  rep.wf_fg = wavefront(multiply(f, g), env, part, opt, cfg);

  const std::size_t count = part.sectors.size();
  for (const auto& p : rep.wf_f.tested) {
    ProductCheckPoint cp;
    cp.point = p;
    cp.sum_f = rep.wf_f.sectors_at(p, 0.0, count);
    cp.sum_g = rep.wf_g.sectors_at(p, 0.0, count);
    const ConeSum cs = cone_sum(cp.sum_f, cp.sum_g, part);
    cp.hypothesis_ok = !cs.zero_hit;
    cp.predicted = set_union(cs.sectors, set_union(cp.sum_f, cp.sum_g));
    cp.measured = rep.wf_fg.sectors_at(p, 0.0, count);
    if (!cp.hypothesis_ok) {
      ++rep.skipped;
    } else {
      cp.contained = contained_with_slack(cp.measured, cp.predicted, part);
      rep.all_pass = rep.all_pass && cp.contained;
    }
    rep.points.push_back(std::move(cp));
  }
  return rep;
}

OperatorWavefrontReport microlocal_pseudolocality(
    std::span<const DiffTerm> op, const Net& f, const WeightEnvelope& env,
    const ConePartition& part, const WavefrontOptions& opt,
    const DecaySearchConfig& cfg) {
  if (op.empty())
    throw Error(ErrorKind::parameter, "operator has no terms");
  OperatorWavefrontReport rep;
  rep.wf_u = wavefront(f, env, part, opt, cfg);
  rep.wf_pu = wavefront(apply_diffop(f, op), env, part, opt, cfg);
  const std::size_t count = part.sectors.size();
  for (const auto& p : rep.wf_pu.tested) {
    const auto meas = rep.wf_pu.sectors_at(p, 0.0, count);
    const auto base = rep.wf_u.sectors_at(p, 0.0, count);
    if (!contained_with_slack(meas, base, part)) rep.contained = false;
  }
  return rep;
}

void export_wavefront_csv(const WaveFrontEstimate& est,
                          const ConePartition& part, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path);
  out << std::setprecision(17);
  out << (part.dim == 1 ? "x" : "x,y")
      << ",sector_center_angle,verdict,a,b,k,margin\n";
  for (const WavefrontEntry& e : est.entries) {
    for (double c : e.point) out << c << ',';
    out << sector_angle(part.sectors[e.sector]) << ','
        << (e.fit.pass ? "pass" : "fail") << ',' << e.fit.a << ',' << e.fit.b
        << ',' << e.fit.k << ',' << e.fit.margin << '\n';
  }
  if (!out) throw Error(ErrorKind::io, "short write to " + path);
}

}  // namespace ultrareg
