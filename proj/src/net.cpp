#include "ultrareg/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "ultrareg/config.hpp"

namespace ultrareg {

using json = nlohmann::json;

namespace {

void require_same_geometry(const Net& a, const Net& b) {
  if (!a.grid.same_geometry(b.grid))
    throw Error(ErrorKind::geometry, "nets live on different grids");
  if (!(a.ladder == b.ladder))
    throw Error(ErrorKind::compatibility, "nets use different scale ladders");
}

SupportKind weakest(SupportKind a, SupportKind b) {
  return static_cast<SupportKind>(
      std::max(static_cast<int>(a), static_cast<int>(b)));
}

// Support of a pointwise product: one compact factor kills the seam.
SupportKind product_support(SupportKind a, SupportKind b) {
  if (a == SupportKind::compact || b == SupportKind::compact)
    return SupportKind::compact;
  return weakest(a, b);
}

Net make_empty(const Grid& g, const ScaleLadder& l) {
  Net n;
  n.grid = g;
  n.ladder = l;
  n.slices.assign(static_cast<std::size_t>(l.count), cvec(g.size()));
  return n;
}

// Integer power by squaring; well defined at a zero base, unlike the
// exp/log route std::pow takes for complex arguments.
std::complex<double> ipow(std::complex<double> z, int k) {
  std::complex<double> r = 1.0;
  while (k > 0) {
    if (k & 1) r *= z;
    z *= z;
    k >>= 1;
  }
  return r;
}

// Mollification scale must be resolvable and the mollifier support must
// stay inside the domain around the given center.
void require_scale_fits(const Grid& g, const ScaleLadder& l, double center,
                        std::size_t axis) {
  const Axis& ax = g.axes[axis];
  const double eps_min = l.eps(l.count - 1);
  if (eps_min < tol::kMinEpsCells * ax.dx)
    throw Error(ErrorKind::resolution,
                "smallest mollification scale falls under " +
                    std::to_string(tol::kMinEpsCells) + " grid cells");
  const double eps_max = l.eps(0);
  const double lo = ax.origin;
  const double hi = ax.origin + ax.length();
  if (center - eps_max < lo || center + eps_max > hi)
    throw Error(ErrorKind::geometry,
                "mollifier support leaves the domain at the largest scale");
}

// Cache bumps across calls: construction integrates a fine cdf table.
SmoothBump& shared_bump(double sigma) {
  static std::vector<std::pair<double, SmoothBump>> cache;
  for (auto& [s, b] : cache)
    if (s == sigma) return b;
  cache.emplace_back(sigma, SmoothBump(sigma));
  return cache.back().second;
}

}  // namespace

ScaleLadder ScaleLadder::geometric(double eps0, double eps_min, int count) {
  if (!(eps0 > 0.0) || !(eps0 < 1.0))
    throw Error(ErrorKind::parameter, "ladder eps0 must lie in (0, 1)");
  if (!(eps_min > 0.0) || !(eps_min < eps0))
    throw Error(ErrorKind::parameter, "ladder needs 0 < eps_min < eps0");
  if (count < 6)
    throw Error(ErrorKind::parameter, "ladder needs at least 6 rungs");
  ScaleLadder l;
  l.eps0 = eps0;
  l.count = count;
  l.ratio = std::pow(eps_min / eps0, 1.0 / static_cast<double>(count - 1));
  return l;
}

double ScaleLadder::eps(int j) const {
  if (j < 0 || j >= count)
    throw Error(ErrorKind::parameter, "ladder rung out of range");
  return eps0 * std::pow(ratio, static_cast<double>(j));
}

std::vector<double> ScaleLadder::all() const {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) v[static_cast<std::size_t>(j)] = eps(j);
  return v;
}

ScaleLadder default_ladder() {
  return ScaleLadder::geometric(defaults::kLadderEps0, defaults::kLadderEpsMin,
                                static_cast<int>(defaults::kLadderCount));
}

const char* to_string(SupportKind k) {
  switch (k) {
    case SupportKind::compact: return "compact";
    case SupportKind::periodic_full: return "periodic_full";
    case SupportKind::non_periodic: return "non_periodic";
  }
  return "compact";
}

SupportKind support_from_string(const std::string& s) {
  if (s == "compact") return SupportKind::compact;
  if (s == "periodic_full") return SupportKind::periodic_full;
  if (s == "non_periodic") return SupportKind::non_periodic;
  throw Error(ErrorKind::schema, "unknown support kind: " + s);
}

const cvec& Net::slice(int j) const {
  if (j < 0 || j >= rungs())
    throw Error(ErrorKind::parameter, "rung index out of range");
  return slices[static_cast<std::size_t>(j)];
}

cvec& Net::slice(int j) {
  if (j < 0 || j >= rungs())
    throw Error(ErrorKind::parameter, "rung index out of range");
  return slices[static_cast<std::size_t>(j)];
}

Net embed_constant(const Grid& g, const ScaleLadder& l, const Sampler1& f,
                   SupportKind support, std::string label) {
  if (g.dim() != 1)
    throw Error(ErrorKind::geometry, "1-D sampler on a 2-D grid");
  Net n = make_empty(g, l);
  cvec& first = n.slices[0];
  for (std::size_t i = 0; i < g.axes[0].n; ++i)
    first[i] = f(g.axes[0].point(i));
  for (int j = 1; j < l.count; ++j) n.slices[static_cast<std::size_t>(j)] = first;
  n.support = {support, SupportKind::compact};
  n.provenance = "constant(" + label + ")";
  return n;
}

Net embed_constant(const Grid& g, const ScaleLadder& l, const Sampler2& f,
                   SupportKind support, std::string label) {
  if (g.dim() != 2)
    throw Error(ErrorKind::geometry, "2-D sampler on a 1-D grid");
  Net n = make_empty(g, l);
  cvec& first = n.slices[0];
  for (std::size_t i = 0; i < g.axes[0].n; ++i)
    for (std::size_t k = 0; k < g.axes[1].n; ++k)
      first[g.index(i, k)] = f(g.axes[0].point(i), g.axes[1].point(k));
  for (int j = 1; j < l.count; ++j) n.slices[static_cast<std::size_t>(j)] = first;
  n.support = {support, support};
  n.provenance = "constant(" + label + ")";
  return n;
}

Net synthesize(const Grid& g, const ScaleLadder& l, const ScaledSampler1& f,
               SupportKind support, std::string label) {
  if (g.dim() != 1)
    throw Error(ErrorKind::geometry, "1-D sampler on a 2-D grid");
  Net n = make_empty(g, l);
  for (int j = 0; j < l.count; ++j) {
    const double eps = l.eps(j);
    cvec& s = n.slices[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < g.axes[0].n; ++i)
      s[i] = f(g.axes[0].point(i), eps);
  }
  n.support = {support, SupportKind::compact};
  n.provenance = "synthetic(" + label + ")";
  return n;
}

Net synthesize(const Grid& g, const ScaleLadder& l, const ScaledSampler2& f,
               SupportKind support, std::string label) {
  if (g.dim() != 2)
    throw Error(ErrorKind::geometry, "2-D sampler on a 1-D grid");
  Net n = make_empty(g, l);
  for (int j = 0; j < l.count; ++j) {
    const double eps = l.eps(j);
    cvec& s = n.slices[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < g.axes[0].n; ++i)
      for (std::size_t k = 0; k < g.axes[1].n; ++k)
        s[g.index(i, k)] = f(g.axes[0].point(i), g.axes[1].point(k), eps);
  }
  n.support = {support, support};
  n.provenance = "synthetic(" + label + ")";
  return n;
}

namespace {

// 1-D profile of one singular term along its axis at a given scale.
void add_term_1d(cvec& out, const Axis& ax, const SingularTerm& t,
                 const SmoothBump& bump, double eps) {
  switch (t.kind) {
    case SingularTerm::Kind::delta: {
      for (std::size_t i = 0; i < ax.n; ++i) {
        const double u = (ax.point(i) - t.point[0]) / eps;
        if (std::abs(u) < 1.0) out[i] += t.coeff * bump.value(u) / eps;
      }
      break;
    }
    case SingularTerm::Kind::delta_derivative: {
      const double scale =
          t.coeff * std::pow(eps, -1.0 - static_cast<double>(t.order));
      for (std::size_t i = 0; i < ax.n; ++i) {
        const double u = (ax.point(i) - t.point[0]) / eps;
        if (std::abs(u) < 1.0) {
          const auto jet = bump.derivatives(u, t.order);
          out[i] += scale * jet[static_cast<std::size_t>(t.order)];
        }
      }
      break;
    }
    case SingularTerm::Kind::heaviside: {
      for (std::size_t i = 0; i < ax.n; ++i)
        out[i] += t.coeff * bump.cdf((ax.point(i) - t.point[0]) / eps);
      break;
    }
    default:
      throw Error(ErrorKind::parameter, "term is not one-dimensional");
  }
}

}  // namespace

Net mollify(const Grid& g, const ScaleLadder& l,
            std::span<const SingularTerm> terms, const MollifierSpec& m) {
  if (terms.empty())
    throw Error(ErrorKind::parameter, "no singular terms supplied");
  const SmoothBump& bump = shared_bump(m.sigma);
  Net n = make_empty(g, l);
  SupportKind sup0 = SupportKind::compact;
  SupportKind sup1 = SupportKind::compact;
  std::string desc;

  for (const SingularTerm& t : terms) {
    if (!desc.empty()) desc += " + ";
    switch (t.kind) {
      case SingularTerm::Kind::delta: {
        if (g.dim() == 1) {
          require_scale_fits(g, l, t.point[0], 0);
          for (int j = 0; j < l.count; ++j)
            add_term_1d(n.slices[static_cast<std::size_t>(j)], g.axes[0], t,
                        bump, l.eps(j));
        } else {
          require_scale_fits(g, l, t.point[0], 0);
          require_scale_fits(g, l, t.point[1], 1);
          for (int j = 0; j < l.count; ++j) {
            const double eps = l.eps(j);
            cvec& s = n.slices[static_cast<std::size_t>(j)];
            for (std::size_t i = 0; i < g.axes[0].n; ++i) {
              const double u0 = (g.axes[0].point(i) - t.point[0]) / eps;
              if (std::abs(u0) >= 1.0) continue;
              const double v0 = bump.value(u0) / eps;
              for (std::size_t k = 0; k < g.axes[1].n; ++k) {
                const double u1 = (g.axes[1].point(k) - t.point[1]) / eps;
                if (std::abs(u1) >= 1.0) continue;
                s[g.index(i, k)] += t.coeff * v0 * bump.value(u1) / eps;
              }
            }
          }
        }
        desc += "delta(" + std::to_string(t.point[0]) +
                (g.dim() == 2 ? "," + std::to_string(t.point[1]) : "") + ")";
        break;
      }
      case SingularTerm::Kind::delta_derivative: {
        if (g.dim() != 1)
          throw Error(ErrorKind::parameter,
                      "delta derivatives are one-dimensional terms");
        if (t.order < 0 || t.order > 16)
          throw Error(ErrorKind::parameter, "jet order must lie in [0, 16]");
        require_scale_fits(g, l, t.point[0], 0);
        for (int j = 0; j < l.count; ++j)
          add_term_1d(n.slices[static_cast<std::size_t>(j)], g.axes[0], t,
                      bump, l.eps(j));
        desc += "delta^(" + std::to_string(t.order) + ")(" +
                std::to_string(t.point[0]) + ")";
        break;
      }
      case SingularTerm::Kind::heaviside: {
        if (g.dim() != 1)
          throw Error(ErrorKind::parameter, "heaviside is a 1-D term");
        require_scale_fits(g, l, t.point[0], 0);
        for (int j = 0; j < l.count; ++j)
          add_term_1d(n.slices[static_cast<std::size_t>(j)], g.axes[0], t,
                      bump, l.eps(j));
        sup0 = SupportKind::non_periodic;
        desc += "heaviside(" + std::to_string(t.point[0]) + ")";
        break;
      }
      case SingularTerm::Kind::delta_sheet: {
        if (g.dim() != 2)
          throw Error(ErrorKind::parameter, "delta sheets need a 2-D grid");
        if (t.axis < 0 || t.axis > 1)
          throw Error(ErrorKind::parameter, "sheet axis must be 0 or 1");
        const auto a = static_cast<std::size_t>(t.axis);
        require_scale_fits(g, l, t.point[0], a);
        for (int j = 0; j < l.count; ++j) {
          const double eps = l.eps(j);
          cvec& s = n.slices[static_cast<std::size_t>(j)];
          const Axis& ax = g.axes[a];
          for (std::size_t i = 0; i < ax.n; ++i) {
            const double u = (ax.point(i) - t.point[0]) / eps;
            if (std::abs(u) >= 1.0) continue;
            const double v = t.coeff * bump.value(u) / eps;
            if (a == 0) {
              for (std::size_t k = 0; k < g.axes[1].n; ++k)
                s[g.index(i, k)] += v;
            } else {
              for (std::size_t k = 0; k < g.axes[0].n; ++k)
                s[g.index(k, i)] += v;
            }
          }
        }
        if (t.axis == 0)
          sup1 = weakest(sup1, SupportKind::periodic_full);
        else
          sup0 = weakest(sup0, SupportKind::periodic_full);
        desc += "sheet(axis=" + std::to_string(t.axis) + ", c=" +
                std::to_string(t.point[0]) + ")";
        break;
      }
    }
  }
  n.support = {sup0, g.dim() == 2 ? sup1 : SupportKind::compact};
  std::ostringstream prov;
  prov << "mollified(" << desc << "; bump sigma=" << m.sigma << ")";
  n.provenance = prov.str();
  return n;
}

namespace {

// Spectral multipliers of the discrete mollifier kernel, one per rung:
// the DFT of the sampled, mass-normalised eps^{-1} phi(x/eps).
cvec kernel_multiplier(const Axis& ax, const SmoothBump& bump, double eps) {
  cvec kernel(ax.n, 0.0);
  // Kernel centred at index 0 with periodic wrap, so no phase shift.
  for (std::size_t i = 0; i < ax.n; ++i) {
    const double x = (i <= ax.n / 2 ? static_cast<double>(i)
                                     : static_cast<double>(i) -
                                           static_cast<double>(ax.n)) *
                     ax.dx;
    const double u = x / eps;
    if (std::abs(u) < 1.0) kernel[i] = bump.value(u) / eps;
  }
  std::complex<double> mass = 0.0;
  for (const auto& v : kernel) mass += v;
  if (std::abs(mass) == 0.0)
    throw Error(ErrorKind::resolution, "mollifier kernel lost under the grid");
  for (auto& v : kernel) v /= mass;  // exact unit discrete mass
  fft_inplace(kernel, -1);
  return kernel;
}

}  // namespace

Net mollify_smooth(const Grid& g, const ScaleLadder& l, const Sampler1& f,
                   const MollifierSpec& m, SupportKind support,
                   std::string label) {
  if (g.dim() != 1)
    throw Error(ErrorKind::geometry, "1-D sampler on a 2-D grid");
  if (support == SupportKind::non_periodic)
    throw Error(ErrorKind::domain,
                "cannot mollify non-periodic data spectrally");
  const double eps_min = l.eps(l.count - 1);
  if (eps_min < tol::kMinEpsCells * g.axes[0].dx)
    throw Error(ErrorKind::resolution,
                "smallest mollification scale falls under 4 grid cells");
  const SmoothBump& bump = shared_bump(m.sigma);
  cvec base(g.axes[0].n);
  for (std::size_t i = 0; i < g.axes[0].n; ++i)
    base[i] = f(g.axes[0].point(i));
  cvec base_hat = base;
  fft_inplace(base_hat, -1);

  Net n = make_empty(g, l);
  for (int j = 0; j < l.count; ++j) {
    const cvec mult = kernel_multiplier(g.axes[0], bump, l.eps(j));
    cvec s(g.axes[0].n);
    for (std::size_t i = 0; i < g.axes[0].n; ++i) s[i] = base_hat[i] * mult[i];
    fft_inplace(s, +1);
    n.slices[static_cast<std::size_t>(j)] = std::move(s);
  }
  n.support = {support, SupportKind::compact};
  std::ostringstream prov;
  prov << "mollified(smooth " << label << "; bump sigma=" << m.sigma << ")";
  n.provenance = prov.str();
  return n;
}

Net mollify_smooth(const Grid& g, const ScaleLadder& l, const Sampler2& f,
                   const MollifierSpec& m, SupportKind support,
                   std::string label) {
  if (g.dim() != 2)
    throw Error(ErrorKind::geometry, "2-D sampler on a 1-D grid");
  if (support == SupportKind::non_periodic)
    throw Error(ErrorKind::domain,
                "cannot mollify non-periodic data spectrally");
  for (std::size_t d = 0; d < 2; ++d)
    if (l.eps(l.count - 1) < tol::kMinEpsCells * g.axes[d].dx)
      throw Error(ErrorKind::resolution,
                  "smallest mollification scale falls under 4 grid cells");
  const SmoothBump& bump = shared_bump(m.sigma);
  cvec base(g.size());
  for (std::size_t i = 0; i < g.axes[0].n; ++i)
    for (std::size_t k = 0; k < g.axes[1].n; ++k)
      base[g.index(i, k)] = f(g.axes[0].point(i), g.axes[1].point(k));
  fft2_inplace(base, g.axes[0].n, g.axes[1].n, -1);

  Net n = make_empty(g, l);
  for (int j = 0; j < l.count; ++j) {
    const cvec m0 = kernel_multiplier(g.axes[0], bump, l.eps(j));
    const cvec m1 = kernel_multiplier(g.axes[1], bump, l.eps(j));
    cvec s(g.size());
    for (std::size_t i = 0; i < g.axes[0].n; ++i)
      for (std::size_t k = 0; k < g.axes[1].n; ++k)
        s[g.index(i, k)] = base[g.index(i, k)] * m0[i] * m1[k];
    fft2_inplace(s, g.axes[0].n, g.axes[1].n, +1);
    n.slices[static_cast<std::size_t>(j)] = std::move(s);
  }
  n.support = {support, support};
  std::ostringstream prov;
  prov << "mollified(smooth " << label << "; bump sigma=" << m.sigma << ")";
  n.provenance = prov.str();
  return n;
}

Net add(const Net& a, const Net& b) {
  require_same_geometry(a, b);
  Net n = make_empty(a.grid, a.ladder);
  for (int j = 0; j < a.rungs(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    for (std::size_t i = 0; i < a.grid.size(); ++i)
      n.slices[ju][i] = a.slices[ju][i] + b.slices[ju][i];
  }
  n.support = {weakest(a.support[0], b.support[0]),
               weakest(a.support[1], b.support[1])};
  n.provenance = "sum(" + a.provenance + ", " + b.provenance + ")";
  return n;
}

Net multiply(const Net& a, const Net& b) {
  require_same_geometry(a, b);
  Net n = make_empty(a.grid, a.ladder);
  for (int j = 0; j < a.rungs(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    for (std::size_t i = 0; i < a.grid.size(); ++i)
      n.slices[ju][i] = a.slices[ju][i] * b.slices[ju][i];
  }
  n.support = {product_support(a.support[0], b.support[0]),
               product_support(a.support[1], b.support[1])};
  n.provenance = "product(" + a.provenance + ", " + b.provenance + ")";
  return n;
}

Net scalar_multiply(const Net& a, std::complex<double> s) {
  Net n = a;
  for (auto& slice : n.slices)
    for (auto& v : slice) v *= s;
  std::ostringstream prov;
  prov << "scaled(" << s.real();
  if (s.imag() != 0.0) prov << (s.imag() < 0 ? "-" : "+")
                            << std::abs(s.imag()) << "i";
  prov << ", " << a.provenance << ")";
  n.provenance = prov.str();
  return n;
}

Net multiply_window(const Net& a, const Window& w) {
  const std::vector<double> mask = sample_window(w, a.grid);
  Net n = make_empty(a.grid, a.ladder);
  for (int j = 0; j < a.rungs(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    for (std::size_t i = 0; i < a.grid.size(); ++i)
      n.slices[ju][i] = a.slices[ju][i] * mask[i];
  }
  n.support = {SupportKind::compact, SupportKind::compact};
  std::ostringstream prov;
  prov << "windowed(r=" << w.radius << " at";
  for (double c : w.center) prov << " " << c;
  prov << ", " << a.provenance << ")";
  n.provenance = prov.str();
  return n;
}

namespace {

// Seam cells of a compact axis must stay near zero: data riding the wrap
// seam under a compact claim means the support label is wrong. Checked on
// the input of spectral work; outputs ring at the seam in proportion to
// the multiplier and that is expected behaviour, not mislabeling.
void check_seam(const Net& n) {
  for (std::size_t d = 0; d < n.grid.dim(); ++d) {
    if (n.support[d] != SupportKind::compact) continue;
    double seam = 0.0, peak = 0.0;
    for (int j = 0; j < n.rungs(); ++j) {
      const cvec& s = n.slices[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < n.grid.size(); ++i)
        peak = std::max(peak, std::abs(s[i]));
      if (n.grid.dim() == 1) {
        seam = std::max({seam, std::abs(s[0]), std::abs(s[n.grid.axes[0].n - 1])});
      } else {
        const std::size_t n0 = n.grid.axes[0].n;
        const std::size_t n1 = n.grid.axes[1].n;
        if (d == 0) {
          for (std::size_t k = 0; k < n1; ++k)
            seam = std::max({seam, std::abs(s[n.grid.index(0, k)]),
                             std::abs(s[n.grid.index(n0 - 1, k)])});
        } else {
          for (std::size_t i = 0; i < n0; ++i)
            seam = std::max({seam, std::abs(s[n.grid.index(i, 0)]),
                             std::abs(s[n.grid.index(i, n1 - 1)])});
        }
      }
    }
    if (peak > 0.0 && seam > tol::kRingingTol * peak)
      throw Error(ErrorKind::resolution,
                  "compact support claim fails at the domain seam");
  }
}

}  // namespace

Net derivative(const Net& a, const MultiIndex& alpha) {
  if (alpha.total() == 0) return a;
  if (alpha.total() > tol::kMaxDerivTotal)
    throw Error(ErrorKind::parameter, "derivative order above spectral cap");
  for (std::size_t d = 0; d < a.grid.dim(); ++d)
    if (alpha.order[d] > 0 && a.support[d] == SupportKind::non_periodic)
      throw Error(ErrorKind::domain,
                  "spectral derivative across a non-periodic seam");
  if (a.grid.dim() == 1 && alpha.order[1] != 0)
    throw Error(ErrorKind::parameter, "second axis derivative on a 1-D net");
  check_seam(a);

  Net n = make_empty(a.grid, a.ladder);
  const std::size_t n0 = a.grid.axes[0].n;
  const std::size_t n1 = a.grid.dim() == 2 ? a.grid.axes[1].n : 1;

  // Per-axis multiplier tables (i xi)^m with the Nyquist row zeroed for
  // odd m, keeping real data real.
  auto axis_mult = [](const Axis& ax, int m) {
    cvec t(ax.n, 1.0);
    if (m == 0) return t;
    for (std::size_t i = 0; i < ax.n; ++i) {
      if (i == ax.n / 2 && (m % 2) == 1) {
        t[i] = 0.0;
        continue;
      }
      t[i] = ipow(std::complex<double>(0.0, ax.freq(i)), m);
    }
    return t;
  };
  const cvec m0 = axis_mult(a.grid.axes[0], alpha.order[0]);
  const cvec m1 = a.grid.dim() == 2 ? axis_mult(a.grid.axes[1], alpha.order[1])
                                    : cvec{};

  for (int j = 0; j < a.rungs(); ++j) {
    cvec work = a.slices[static_cast<std::size_t>(j)];
    fft_grid(work, a.grid, -1);
    if (a.grid.dim() == 1) {
      for (std::size_t i = 0; i < n0; ++i) work[i] *= m0[i];
    } else {
      for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t k = 0; k < n1; ++k)
          work[a.grid.index(i, k)] *= m0[i] * m1[k];
    }
    fft_grid(work, a.grid, +1);
    n.slices[static_cast<std::size_t>(j)] = std::move(work);
  }
  n.support = a.support;
  std::ostringstream prov;
  prov << "derivative(a=(" << alpha.order[0];
  if (a.grid.dim() == 2) prov << "," << alpha.order[1];
  prov << "), " << a.provenance << ")";
  n.provenance = prov.str();
  return n;
}

Net apply_diffop(const Net& u, std::span<const DiffTerm> terms) {
  if (terms.empty())
    throw Error(ErrorKind::parameter, "operator has no terms");
  Net acc = make_empty(u.grid, u.ladder);
  acc.support = {SupportKind::compact, SupportKind::compact};
  bool first = true;
  for (const DiffTerm& t : terms) {
    Net part = derivative(u, t.alpha);
    if (t.coeff != nullptr) part = multiply(part, *t.coeff);
    if (t.scalar != std::complex<double>(1.0, 0.0))
      part = scalar_multiply(part, t.scalar);
    if (first) {
      acc = std::move(part);
      first = false;
    } else {
      acc = add(acc, part);
    }
  }
  std::ostringstream prov;
  prov << "operator(" << terms.size() << " terms, " << u.provenance << ")";
  acc.provenance = prov.str();
  return acc;
}

Net apply_ultradiffop(const Net& u, const WeightSequence& m,
                      std::span<const std::pair<int, double>> coeffs, double h,
                      double c, const GradedBound& growth, double tol,
                      UltradiffCertificate* certificate) {
  if (u.grid.dim() != 1)
    throw Error(ErrorKind::parameter,
                "infinite-order operators act on 1-D nets");
  if (!(tol > 0.0))
    throw Error(ErrorKind::parameter, "tail tolerance must be positive");
  const auto admissible = validate_ultradiff_coefficients(m, coeffs, h, c);
  if (!admissible.admissible)
    throw Error(ErrorKind::compatibility,
                "coefficients exceed the (h, c) budget for this sequence");
  if (growth.profile.kind == RegKind::full)
    throw Error(ErrorKind::truncation,
                "no graded bound available to certify the tail");
  if (u.support[0] == SupportKind::non_periodic)
    throw Error(ErrorKind::domain,
                "spectral operator across a non-periodic seam");
  check_seam(u);

  // Tail of sum_{k>G} c h^k / M_k * sup|d^k u|, with the measured graded
  // bound sup|d^k u_eps| <= e^{lc (k+1)} M_k eps^{-N(k)}: a geometric
  // series with per-rung ratio q = h e^{lc} eps^{-a}.
  const double lc = growth.log_c;
  const double a_slope =
      growth.profile.kind == RegKind::affine ? growth.profile.a : 0.0;
  int used = -1;
  double worst_tail = 0.0, worst_ratio = 0.0;
  for (int g = 0; g <= tol::kUltradiffMaxOrder; ++g) {
    worst_tail = 0.0;
    worst_ratio = 0.0;
    bool ok = true;
    for (int j = 0; j < u.rungs(); ++j) {
      const double eps = u.ladder.eps(j);
      const double q = h * std::exp(lc) * std::pow(eps, -a_slope);
      worst_ratio = std::max(worst_ratio, q);
      if (q >= 1.0) {
        ok = false;
        break;
      }
      // First omitted term over (1 - q), in logs to dodge overflow.
      const double log_first =
          std::log(c) + static_cast<double>(g + 1) * std::log(q) + lc -
          growth.profile.b * std::log(eps);
      const double tail = std::exp(log_first) / (1.0 - q);
      worst_tail = std::max(worst_tail, tail);
    }
    if (ok && worst_tail < tol) {
      used = g;
      break;
    }
  }
  if (used < 0)
    throw Error(ErrorKind::truncation,
                "tail cannot be certified below tolerance at any order <= " +
                    std::to_string(tol::kUltradiffMaxOrder));

  // One transform per rung: accumulate the polynomial multiplier.
  Net n = make_empty(u.grid, u.ladder);
  const Axis& ax = u.grid.axes[0];
  cvec mult(ax.n, 0.0);
  for (const auto& [k, coeff] : coeffs) {
    if (k > used) continue;
    for (std::size_t i = 0; i < ax.n; ++i) {
      if (i == ax.n / 2 && (k % 2) == 1) continue;  // Nyquist, odd order
      mult[i] += coeff * ipow(std::complex<double>(0.0, ax.freq(i)), k);
    }
  }
  for (int j = 0; j < u.rungs(); ++j) {
    cvec work = u.slices[static_cast<std::size_t>(j)];
    fft_inplace(work, -1);
    for (std::size_t i = 0; i < ax.n; ++i) work[i] *= mult[i];
    fft_inplace(work, +1);
    n.slices[static_cast<std::size_t>(j)] = std::move(work);
  }
  n.support = u.support;
  std::ostringstream prov;
  prov << "operator(ultra order<=" << used << ", " << u.provenance << ")";
  n.provenance = prov.str();
  if (certificate != nullptr)
    *certificate = {used, worst_tail, worst_ratio};
  return n;
}

double sup_norm(const Net& a, int rung) {
  const cvec& s = a.slice(rung);
  double m = 0.0;
  for (const auto& v : s) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> sup_table(const Net& a) {
  std::vector<double> t(static_cast<std::size_t>(a.rungs()));
  for (int j = 0; j < a.rungs(); ++j)
    t[static_cast<std::size_t>(j)] = sup_norm(a, j);
  return t;
}

double Spectrum::delta_xi(std::size_t axis) const {
  return 2.0 * std::numbers::pi / grid.axes.at(axis).length();
}

double Spectrum::freq(std::size_t axis, std::size_t i) const {
  return grid.axes.at(axis).freq(i);
}

Spectrum fourier(const Net& a) {
  for (std::size_t d = 0; d < a.grid.dim(); ++d)
    if (a.support[d] != SupportKind::compact)
      throw Error(ErrorKind::geometry,
                  "continuous transform needs compact support on every axis");
  check_seam(a);
  Spectrum sp;
  sp.grid = a.grid;
  sp.eps = a.ladder.all();
  sp.slices.reserve(static_cast<std::size_t>(a.rungs()));

  double cell = 1.0;
  for (const Axis& ax : a.grid.axes) cell *= ax.dx;

  for (int j = 0; j < a.rungs(); ++j) {
    cvec work = a.slices[static_cast<std::size_t>(j)];
    double space_l2 = 0.0;
    for (const auto& v : work) space_l2 += std::norm(v);
    space_l2 *= cell;

    fft_grid(work, a.grid, -1);

    // dx^n and the origin phase: hat(xi) = dx^n e^{-i xi . origin} DFT.
    const std::size_t n0 = a.grid.axes[0].n;
    const std::size_t n1 = a.grid.dim() == 2 ? a.grid.axes[1].n : 1;
    for (std::size_t i = 0; i < n0; ++i) {
      const double p0 = a.grid.axes[0].freq(i) * a.grid.axes[0].origin;
      for (std::size_t k = 0; k < n1; ++k) {
        const double p =
            p0 + (a.grid.dim() == 2
                      ? a.grid.axes[1].freq(k) * a.grid.axes[1].origin
                      : 0.0);
        work[a.grid.dim() == 2 ? a.grid.index(i, k) : i] *=
            cell * std::exp(std::complex<double>(0.0, -p));
      }
    }

    double freq_l2 = 0.0;
    for (const auto& v : work) freq_l2 += std::norm(v);
    double dxi = 1.0;
    for (std::size_t d = 0; d < a.grid.dim(); ++d) dxi *= sp.delta_xi(d);
    freq_l2 *= dxi / std::pow(2.0 * std::numbers::pi,
                              static_cast<double>(a.grid.dim()));

    const double scale = std::max(space_l2, freq_l2);
    if (scale > 0.0 &&
        std::abs(space_l2 - freq_l2) > tol::kParseval * scale)
      throw Error(ErrorKind::domain,
                  "energy identity violated by the transform round trip");
    sp.slices.push_back(std::move(work));
  }
  return sp;
}

// ---- persistence ----

namespace {

json grid_to_json(const Grid& g) {
  json axes = json::array();
  for (const Axis& a : g.axes)
    axes.push_back({{"origin", a.origin}, {"dx", a.dx}, {"n", a.n}});
  return {{"axes", axes}};
}

Grid grid_from_json(const json& j) {
  std::vector<Axis> axes;
  for (const auto& a : j.at("axes"))
    axes.push_back(Axis{a.at("origin").get<double>(), a.at("dx").get<double>(),
                        a.at("n").get<std::size_t>()});
  return Grid::make(std::move(axes));
}

}  // namespace

void save_net(const Net& a, const std::string& path) {
  json header = {
      {"magic", "grnet"},
      {"version", 1},
      {"grid", grid_to_json(a.grid)},
      {"ladder",
       {{"eps0", a.ladder.eps0}, {"ratio", a.ladder.ratio}, {"count", a.ladder.count}}},
      {"support", {to_string(a.support[0]), to_string(a.support[1])}},
      {"provenance", a.provenance},
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  out << header.dump() << "\n";
  static_assert(std::endian::native == std::endian::little,
                "serialisation assumes a little-endian host");
  for (const cvec& s : a.slices)
    out.write(reinterpret_cast<const char*>(s.data()),
              static_cast<std::streamsize>(s.size() * sizeof(s[0])));
  if (!out) throw Error(ErrorKind::io, "short write to " + path);
}

Net load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::io, "missing header line in " + path);
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema, std::string("bad net header: ") + e.what());
  }
  try {
    if (header.at("magic").get<std::string>() != "grnet")
      throw Error(ErrorKind::schema, "not a grnet file: " + path);
    if (header.at("version").get<int>() != 1)
      throw Error(ErrorKind::schema, "unsupported grnet version");
    Net n;
    n.grid = grid_from_json(header.at("grid"));
    const auto& lj = header.at("ladder");
    n.ladder.eps0 = lj.at("eps0").get<double>();
    n.ladder.ratio = lj.at("ratio").get<double>();
    n.ladder.count = lj.at("count").get<int>();
    if (n.ladder.count < 1 || !(n.ladder.eps0 > 0.0) || !(n.ladder.ratio > 0.0))
      throw Error(ErrorKind::schema, "bad ladder parameters");
    const auto& sj = header.at("support");
    n.support[0] = support_from_string(sj.at(0).get<std::string>());
    n.support[1] = support_from_string(sj.at(1).get<std::string>());
    n.provenance = header.at("provenance").get<std::string>();

    n.slices.assign(static_cast<std::size_t>(n.ladder.count),
                    cvec(n.grid.size()));
    for (cvec& s : n.slices) {
      in.read(reinterpret_cast<char*>(s.data()),
              static_cast<std::streamsize>(s.size() * sizeof(s[0])));
      if (in.gcount() !=
          static_cast<std::streamsize>(s.size() * sizeof(s[0])))
        throw Error(ErrorKind::io, "truncated slice data in " + path);
    }
    return n;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::schema, std::string("bad net header: ") + e.what());
  }
}

void export_slice_csv(const Net& a, int rung, const std::string& path) {
  const cvec& s = a.slice(rung);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  out.precision(17);
  if (a.grid.dim() == 1) {
    out << "x,re,im\n";
    for (std::size_t i = 0; i < a.grid.axes[0].n; ++i)
      out << a.grid.axes[0].point(i) << "," << s[i].real() << ","
          << s[i].imag() << "\n";
  } else {
    out << "x,y,re,im\n";
    for (std::size_t i = 0; i < a.grid.axes[0].n; ++i)
      for (std::size_t k = 0; k < a.grid.axes[1].n; ++k) {
        const auto& v = s[a.grid.index(i, k)];
        out << a.grid.axes[0].point(i) << "," << a.grid.axes[1].point(k) << ","
            << v.real() << "," << v.imag() << "\n";
      }
  }
  if (!out) throw Error(ErrorKind::io, "short write to " + path);
}

}  // namespace ultrareg
