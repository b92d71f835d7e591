#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ultrareg/config.hpp"
#include "ultrareg/net.hpp"
#include "ultrareg/regsets.hpp"
#include "ultrareg/weights.hpp"

namespace ultrareg {

// One closed sector of directions: unit center and half-angle. In 1-D
// the half-angle is zero and the sector is a single sign.
struct Sector {
  std::vector<double> center;
  double half_angle = 0.0;
};

// Overlapping closed cover of the dual sphere. Neighbouring sectors
// share an angular margin so that window leakage near a boundary lands
// in at least one of them.
struct ConePartition {
  std::size_t dim = 1;
  std::vector<Sector> sectors;
  double overlap = defaults::kSectorOverlap;
  // Separation parameter for sum constructions: a pair of unit
  // directions u, v with |u + v| <= sep counts as antipodal.
  double sep = tol::kZeroHitSep;

  // The two signs of the line.
  static ConePartition line();
  // `count` sectors of equal pitch around the circle, widened by the
  // overlap fraction.
  static ConePartition plane(std::size_t count = defaults::kSectors2d);

  bool contains(std::size_t sector, std::span<const double> dir) const;
  // Same sector, or an angular neighbour on the circle. Line sectors
  // are antipodal and never blur into each other.
  bool adjacent(std::size_t i, std::size_t j) const;
};

// How the decay search grades the loss profile: the affine box frees
// the scale exponent a in [0, 2]; the bounded box pins a = 0, which is
// the grading under which mollified point singularities keep nonempty
// singular directions.
struct DecaySearchConfig {
  RegKind grading = RegKind::affine;
  // Set >= 0 to pin the scale exponent instead of measuring it (snapped
  // to the search grid). A pinned exponent that cannot keep up with the
  // measured per-rung scale drift fails the fit: no uniform k exists at
  // that exponent. The bounded grading pins 0 regardless.
  double pin_a = -1.0;
};

// Certified directional decay bound
//   |F(f_eps)(xi)| <= C eps^{-b} exp(-Mtilde(k eps^a |xi|))
// over one sector, all ladder rungs, and every sampled frequency in the
// instrument's dynamic range (dropping |xi| below rho0, above 2/3 of
// Nyquist, and samples deeper than the aliasing floor allows).
struct DecayFit {
  bool pass = false;
  double a = 0.0;
  double b = 0.0;
  double k = 0.0;
  double log_c = 0.0;
  double margin = 0.0;  // log_c minus the certification cap; <= 0 passes
  double rho0 = 0.0;
  int points = 0;  // samples that joined the per-rung fits
};

DecayFit fit_decay(const Spectrum& s, const ConePartition& part,
                   std::size_t sector, const WeightEnvelope& env,
                   const DecaySearchConfig& cfg = {});

// Directions along which a compactly supported net fails its decay
// budget, with the per-sector evidence either way. The net is brought
// to unit sup before transforming: membership in a decay budget is
// scale free, the certificate cap is not.
struct SigmaSet {
  std::vector<bool> singular;
  std::vector<DecayFit> fits;

  bool empty() const;
  std::vector<std::size_t> sectors() const;
};

SigmaSet sigma_set(const Net& f, const WeightEnvelope& env,
                   const ConePartition& part,
                   const DecaySearchConfig& cfg = {});

// Shrinking cutoff family for pointwise localization.
struct PointOptions {
  int radius_cells = defaults::kPointRadiusCells;
  int radius_count = defaults::kPointRadiusCount;
  double shrink = defaults::kPointShrink;
  double window_sigma = 1.5;
};

// Singular directions at one base point: the smallest cutoff decides,
// the larger radii stand witness. radii_agree flags a clean reading;
// a disagreement means energy from outside the smallest window still
// shapes the larger fits.
struct PointSigma {
  std::vector<bool> singular;
  std::vector<double> radii;  // largest to smallest
  std::vector<SigmaSet> per_radius;
  bool radii_agree = true;
};

PointSigma sigma_at_point(const Net& f, std::span<const double> x0,
                          const WeightEnvelope& env, const ConePartition& part,
                          const PointOptions& opt = {},
                          const DecaySearchConfig& cfg = {});

// Wave-front estimation sweep: sigma_at_point on a regular lattice of
// base points, keeping one window radius clear of the domain seam.
struct WavefrontOptions {
  int stride_cells = defaults::kWavefrontStride;
  PointOptions point;
};

struct WavefrontEntry {
  std::vector<double> point;
  std::size_t sector = 0;
  DecayFit fit;  // the failing smallest-radius evidence
};

struct WaveFrontEstimate {
  std::vector<WavefrontEntry> entries;  // sorted by point, then sector
  std::vector<std::vector<double>> tested;

  // Base points carrying at least one singular sector.
  std::vector<std::vector<double>> point_projection() const;
  // Sectors singular at at least one base point.
  std::vector<std::size_t> sector_projection() const;
  // Sectors singular at the base points nearest to x0 (within slack).
  std::vector<bool> sectors_at(std::span<const double> x0, double slack,
                               std::size_t sector_count) const;
};

WaveFrontEstimate wavefront(const Net& f, const WeightEnvelope& env,
                            const ConePartition& part,
                            const WavefrontOptions& opt = {},
                            const DecaySearchConfig& cfg = {});

// Sectors containing a pairwise sum of singular-sector center rays;
// the closure of the true sum set is recovered by adding S1 and S2
// back. zero_hit reports a near-cancelling direction pair anywhere in
// the two cone families, the failure of the product hypothesis.
struct ConeSum {
  std::vector<bool> sectors;
  bool zero_hit = false;
};

ConeSum cone_sum(const std::vector<bool>& s1, const std::vector<bool>& s2,
                 const ConePartition& part);

// Product law: at every tested point where the hypothesis holds (no
// zero hit), the measured wave front of f*g must sit inside
// cone_sum(WF f, WF g) union WF f union WF g, one sector of slack.
struct ProductCheckPoint {
  std::vector<double> point;
  bool hypothesis_ok = true;
  bool contained = true;
  std::vector<bool> sum_f, sum_g;  // sector sets of the factors here
  std::vector<bool> predicted;
  std::vector<bool> measured;
};

struct ProductCheckReport {
  WaveFrontEstimate wf_f, wf_g, wf_fg;
  std::vector<ProductCheckPoint> points;
  bool all_pass = true;   // containment at every hypothesis-ok point
  int skipped = 0;        // points whose hypothesis failed
};

ProductCheckReport product_wavefront_check(const Net& f, const Net& g,
                                           const WeightEnvelope& env,
                                           const ConePartition& part,
                                           const WavefrontOptions& opt = {},
                                           const DecaySearchConfig& cfg = {});

// Operators with admissible coefficients cannot enlarge the wave front:
// WF(Pf) inside WF(f) sector-wise with one sector of slack.
struct OperatorWavefrontReport {
  WaveFrontEstimate wf_u, wf_pu;
  bool contained = true;
};

OperatorWavefrontReport microlocal_pseudolocality(
    std::span<const DiffTerm> op, const Net& f, const WeightEnvelope& env,
    const ConePartition& part, const WavefrontOptions& opt = {},
    const DecaySearchConfig& cfg = {});

// One row per entry: x[,y], sector center angle, verdict, a, b, k, margin.
void export_wavefront_csv(const WaveFrontEstimate& est,
                          const ConePartition& part, const std::string& path);

}  // namespace ultrareg
