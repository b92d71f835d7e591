#pragma once

#include <cstddef>

// Central home for every numeric threshold that a verdict depends on.
// Anything that decides pass/fail lives here, not inline at the use site,
// so reports can cite one set of pinned constants.

namespace ultrareg {
namespace tol {

// ---- exponent classification (scan tables) ----

// A fitted growth exponent this close to zero counts as "no growth".
inline constexpr double kZeroSlope = 0.1;
// Max spread of per-order exponents still read as order-independent.
inline constexpr double kBoundedSpread = 0.1;
// Max residual of the affine fit N_m ~ a*m + b across probed orders.
inline constexpr double kAffineResidual = 0.15;
// Rows whose sup norms sit below this are treated as identically zero.
inline constexpr double kNullSup = 1e-300;
// A net is null when every probed order decays at least this fast.
inline constexpr double kNullDecaySlope = -4.0;
// Null verdicts certify decay for orders up to here, never beyond.
inline constexpr int kNullProbeOrder = 4;
// Sensitivity floor of sliding-window sweeps: a window whose cut-out piece
// stays below this fraction of the net's per-rung sup at every rung carries
// nothing measurable (sampled tails this deep vary by whole e-powers per
// cell, so their spectral derivatives are pure aliasing) and reads as
// regular. Components fainter than this are invisible to a sweep.
inline constexpr double kWindowRelFloor = 1e-6;

// ---- graded-membership consistency rule ----

// Per-order log-constant estimates C_m are compared against the head
// (orders <= kHeadOrders). Membership fails when a later order exceeds
// max(kHeadFactor * head, head + kHeadSlack).
inline constexpr int kHeadOrders = 3;
inline constexpr double kHeadFactor = 1.2;
inline constexpr double kHeadSlack = 0.3;

// ---- spectral decay fits ----

// Smallest admissible fitted frequency-scale factor k. Below this the
// claimed exponential decay is too shallow to certify.
inline constexpr double kMinFreqScale = 0.03;
// Largest admissible loss exponent b.
inline constexpr double kMaxLossExponent = 6.0;
// Largest admissible scale exponent a (2 plus snap slack).
inline constexpr double kMaxScaleExponent = 2.05;
// Largest admissible certified log-prefactor ln C.
inline constexpr double kMaxLogPrefactor = 8.0;
// Fit window in frequency: drop |xi| below this many grid modes and
// above this fraction of the Nyquist frequency.
inline constexpr double kFitLowModes = 8.0;
inline constexpr double kFitHighFraction = 2.0 / 3.0;
// Only samples whose log-magnitude sits within [peak - kFitDepth,
// peak - kFitSkim] join the fit; skimming avoids the plateau top,
// depth keeps us clear of the aliasing floor.
inline constexpr double kFitSkim = 3.0;
inline constexpr double kFitDepth = 27.0;
// Golden-section search domain and fixed iteration count for the
// one-parameter frequency-scale fit.
inline constexpr double kKappaLo = 1e-6;
inline constexpr double kKappaHi = 8.0;
inline constexpr int kKappaIters = 80;
// Fitted scale exponents are snapped to this grid pitch.
inline constexpr double kScaleSnap = 0.1;
// Radial bins for the per-rung midline fit, and the fewest filled bins
// a rung needs before its fit joins the exponent regressions.
inline constexpr int kFitBins = 48;
inline constexpr int kMinFitPoints = 6;
// Under the bounded grading no eps-rescaling is available: a fitted
// frequency scale that keeps drifting toward zero along the ladder
// (slope of ln kappa against ln eps above this) means no uniform k
// exists, however large the finest sampled rung's scale still is.
inline constexpr double kKappaDrift = 0.33;

// ---- cones and sums of cones ----

// |u + v| below this (for unit vectors u, v) flags a near-cancelling
// direction pair in a cone sum.
inline constexpr double kZeroHitSep = 0.25;
// Directions sampled per sector when scanning a pair of cone families
// for a near-cancelling pair.
inline constexpr int kConeSumDirs = 5;

// ---- transforms ----

// Relative Parseval defect accepted from the FFT round trip.
inline constexpr double kParseval = 1e-8;

// ---- localisation geometry ----

// Cutoff windows narrower than this many grid cells are unresolvable.
inline constexpr int kMinWindowCells = 8;

// ---- net calculus ----

// Mollification scales below this many grid cells are unresolvable.
inline constexpr int kMinEpsCells = 4;
// Relative seam magnitude tolerated after a spectral derivative of a
// compactly supported slice (trig-interpolant ringing budget).
inline constexpr double kRingingTol = 1e-6;
// Largest total derivative order the spectral path certifies.
inline constexpr int kMaxDerivTotal = 8;
// Truncation cap for infinite-order operator application.
inline constexpr int kUltradiffMaxOrder = 8;

}  // namespace tol

namespace defaults {

// Scale ladder: eps_j = eps0 * ratio^j, j = 0..count-1, with ratio
// chosen so the last rung lands on eps_min.
inline constexpr double kLadderEps0 = 0.3;
inline constexpr double kLadderEpsMin = 0.02;
inline constexpr std::size_t kLadderCount = 10;

// Half the ladder (the small-eps end) feeds asymptotic fits.
inline constexpr std::size_t kFitRungs = 5;

// Highest derivative order probed by default scans.
inline constexpr int kScanOrderMax = 6;

// Log-frequency resolution of the tabulated weight-envelope function.
inline constexpr std::size_t kEnvelopeTable = 4096;

// ---- cone partitions and wave-front sweeps ----

// Sectors around the circle in 2-D; the line always has two.
inline constexpr std::size_t kSectors2d = 8;
// Fraction of the nominal half-angle added to each side so neighbours
// overlap; window leakage near a boundary then lands in a sector.
inline constexpr double kSectorOverlap = 0.25;
// Shrinking cutoff family for pointwise direction scans: largest radius
// in cells, the number of radii, and the shrink factor between them.
inline constexpr int kPointRadiusCells = 32;
inline constexpr int kPointRadiusCount = 3;
inline constexpr double kPointShrink = 0.5;
// Lattice stride of wave-front sweeps, in cells.
inline constexpr int kWavefrontStride = 32;

}  // namespace defaults
}  // namespace ultrareg
