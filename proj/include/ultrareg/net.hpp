#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ultrareg/fft.hpp"
#include "ultrareg/grid.hpp"
#include "ultrareg/mollifier.hpp"
#include "ultrareg/regsets.hpp"
#include "ultrareg/weights.hpp"

namespace ultrareg {

// Geometric scale ladder eps_j = eps0 * ratio^j, j = 0..count-1. All
// asymptotic fits read the ladder from the small end, so count must leave
// enough rungs for a lower-half regression.
struct ScaleLadder {
  double eps0 = 0.0;
  double ratio = 0.0;
  int count = 0;

  // Endpoint form: eps(count-1) == eps_min up to rounding.
  static ScaleLadder geometric(double eps0, double eps_min, int count);

  double eps(int j) const;
  std::vector<double> all() const;
  bool operator==(const ScaleLadder& o) const {
    return eps0 == o.eps0 && ratio == o.ratio && count == o.count;
  }
};

ScaleLadder default_ladder();

// How a slice meets the wrap seam of its periodic axis. Spectral calculus
// is exact for the first two kinds; non-periodic content (a jump carried
// across the seam) must be windowed down to compact before any transform.
enum class SupportKind { compact, periodic_full, non_periodic };

const char* to_string(SupportKind k);
SupportKind support_from_string(const std::string& s);

// A generalized function presented as grid samples along the scale
// ladder: slice j holds the values of u_{eps_j} on the grid, row-major.
struct Net {
  Grid grid;
  ScaleLadder ladder;
  std::vector<cvec> slices;
  std::array<SupportKind, 2> support{SupportKind::compact,
                                     SupportKind::compact};
  std::string provenance;

  int rungs() const { return ladder.count; }
  const cvec& slice(int j) const;
  cvec& slice(int j);
};

// ---- construction ----

using Sampler1 = std::function<std::complex<double>(double)>;
using Sampler2 = std::function<std::complex<double>(double, double)>;
using ScaledSampler1 = std::function<std::complex<double>(double, double)>;
using ScaledSampler2 =
    std::function<std::complex<double>(double, double, double)>;

// Sample once, copy across rungs (the image of a fixed function).
Net embed_constant(const Grid& g, const ScaleLadder& l, const Sampler1& f,
                   SupportKind support, std::string label);
Net embed_constant(const Grid& g, const ScaleLadder& l, const Sampler2& f,
                   SupportKind support, std::string label);

// Explicit eps-dependent families (last argument is eps).
Net synthesize(const Grid& g, const ScaleLadder& l, const ScaledSampler1& f,
               SupportKind support, std::string label);
Net synthesize(const Grid& g, const ScaleLadder& l, const ScaledSampler2& f,
               SupportKind support, std::string label);

// Canonical singular inputs, written directly through the scaled
// mollifier: delta and its derivatives as eps^{-1-m} phi^(m)(x/eps), the
// step as the bump cdf, the 2-D sheet as a 1-D delta tensored with 1.
struct SingularTerm {
  enum class Kind { delta, delta_derivative, heaviside, delta_sheet };
  Kind kind = Kind::delta;
  double coeff = 1.0;
  std::array<double, 2> point{0.0, 0.0};  // location (sheet: offset in [0])
  int order = 0;                          // delta_derivative only, <= 16
  int axis = 0;                           // delta_sheet only
};

struct MollifierSpec {
  // Bump smoothness grade, in (1, 4]. The default 1.5 keeps the kernel's
  // spectral tail far below the aliasing floor of the canonical grids at
  // every ladder scale; 2.0 (the classical profile) is heavier-tailed and
  // measurably folds at the smallest scales.
  double sigma = 1.5;
};

Net mollify(const Grid& g, const ScaleLadder& l,
            std::span<const SingularTerm> terms, const MollifierSpec& m);

// Smooth data convolved with the scaled mollifier (circular convolution
// through the spectral path, kernel normalised to exact unit mass). The
// even bump has vanishing first moment, so sup|u_eps - f| = O(eps^2) for
// smooth f.
Net mollify_smooth(const Grid& g, const ScaleLadder& l, const Sampler1& f,
                   const MollifierSpec& m, SupportKind support,
                   std::string label);
Net mollify_smooth(const Grid& g, const ScaleLadder& l, const Sampler2& f,
                   const MollifierSpec& m, SupportKind support,
                   std::string label);

// ---- algebra ----

Net add(const Net& a, const Net& b);
Net multiply(const Net& a, const Net& b);
Net scalar_multiply(const Net& a, std::complex<double> s);
// Pointwise product with a sampled cutoff window; the result is compact.
Net multiply_window(const Net& a, const Window& w);

// ---- calculus ----

// Spectral partial derivative, |alpha| <= 8 total. Odd-order factors zero
// the Nyquist row so real slices stay real. Axes with non-periodic
// support refuse; compact axes are checked for seam ringing afterwards.
Net derivative(const Net& a, const MultiIndex& alpha);

// Finite-order operator sum c_alpha * d^alpha u, coefficients either
// scalars or nets on the same geometry (coeff != nullptr wins).
struct DiffTerm {
  MultiIndex alpha;
  std::complex<double> scalar{1.0, 0.0};
  const Net* coeff = nullptr;
};
Net apply_diffop(const Net& u, std::span<const DiffTerm> terms);

// Measured derivative-growth model of a net: sup|d^m u_eps| is taken to
// be bounded by exp(log_c)^(m+1) * M_m * eps^(-profile(m)). classify
// produces these; the ultradifferential tail certificate consumes them.
struct GradedBound {
  double log_c = 0.0;
  RegularityClass profile;
};

// Infinite-order operator sum_k a_k d^k u (1-D nets), truncated at the
// smallest order G whose extrapolated tail stays below tol on every rung.
// Coefficients must be admissible for (M, h, c); the tail is the
// geometric sum of c h^k / M_k times the graded bound of u.
struct UltradiffCertificate {
  int order_used = 0;
  double worst_tail = 0.0;
  double worst_ratio = 0.0;  // geometric term ratio at the worst rung
};
Net apply_ultradiffop(const Net& u, const WeightSequence& m,
                      std::span<const std::pair<int, double>> coeffs, double h,
                      double c, const GradedBound& growth, double tol,
                      UltradiffCertificate* certificate = nullptr);

// ---- measurement ----

double sup_norm(const Net& a, int rung);
std::vector<double> sup_table(const Net& a);

// Continuous-normalisation Fourier data of every rung: values of
// integral u(x) exp(-i xi x) dx at the signed lattice frequencies,
// i.e. the DFT scaled by dx^n and the origin phase. Requires compact
// support on every axis and certifies Parseval on each rung.
struct Spectrum {
  Grid grid;  // the originating spatial grid
  std::vector<cvec> slices;
  std::vector<double> eps;

  double delta_xi(std::size_t axis) const;
  // Signed frequency of mode i along an axis.
  double freq(std::size_t axis, std::size_t i) const;
};

Spectrum fourier(const Net& a);

// ---- persistence ----

// .grnet: one JSON header line, then packed little-endian re/im doubles,
// cell-major within each rung, rungs in ladder order.
void save_net(const Net& a, const std::string& path);
Net load_net(const std::string& path);

// One rung as CSV (x[,y],re,im with a header row).
void export_slice_csv(const Net& a, int rung, const std::string& path);

}  // namespace ultrareg
