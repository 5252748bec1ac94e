#pragma once

#include "wavecone/ell.hpp"
#include "wavecone/grid.hpp"
#include "wavecone/operators.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace wavecone {

/// Discretization of H^l restricted to the subspace V inside the grid cube:
/// a regular lattice on V at spacing h/2, each sample splatting its l-volume
/// weight into the containing cell. dim V = 0 yields a single center cell.
GridMeasure plane_measure(int d, const Subspace& V, int n, double h);

/// The measure e H^l |_ V for the certificate's witness e and invariance
/// space V; polar is the constant unit vector e/|e|.
VectorGridMeasure sharp_measure(const FirstOrderOperator& op, const EllCertificate& cert, int n, double h);

struct ResidualOptions {
  std::uint64_t seed = 0;
  std::vector<double> radii{0.2, 0.35, 0.5};
  int centers_per_radius = 5;
};

/// Max over the seeded family of C^2 radial bumps (componentwise in F) of
/// |sum_i <P_i mu(cell), d_i phi(center)> - <P_0 mu(cell), phi(center)>|,
/// the integration-by-parts pairing |<P(D)mu, phi>|.
double weak_residual(const FirstOrderOperator& op, const VectorGridMeasure& mu, const ResidualOptions& opts = {});

struct BlowupResult {
  std::vector<double> center;
  double radius = 0;
  double resampled_total = 0;  // splatted mass before ball restriction
  GridMeasure measure;         // unit-cube grid, mass(closed unit ball) = 1
};

/// Push-forward of mu under y -> (y - x)/r onto a fixed unit-ball grid by
/// mass-conserving binning, restricted to the closed unit ball (cell-center
/// granularity) and normalized to unit ball mass.
BlowupResult blowup(const GridMeasure& mu, std::span<const double> x, double r, int n_out = 64);

/// Max over a seeded set of lattice translations t in V, |t| <= n h / 4, of
/// the normalized L1 distance between shifted and original mass on the
/// overlap. 0 means V-invariant at grid resolution; 2 means fully displaced.
double invariance_defect(const GridMeasure& mu, const Subspace& V, std::uint64_t seed = 0);

/// Greedily grows a subspace from lattice directions of height <= 2 while the
/// spanned subspace keeps invariance_defect <= tol.
Subspace detect_invariance(const GridMeasure& mu, double tol, std::uint64_t seed = 0);

/// (r, mu(Q_r(x)) / r^kappa) for each radius; Q_r is the cube of side 2r.
std::vector<std::pair<double, double>> upper_density(const GridMeasure& mu, std::span<const double> x,
                                                     double kappa, std::span<const double> radii);

struct BoxDimEstimate {
  bool degenerate = false;  // all per-scale counts equal
  double estimate = 0;
  double r2 = 0;
  std::vector<std::pair<double, std::uint64_t>> scale_counts;  // (box side, count)
};

/// Least-squares slope of log N(eps) against log(1/eps) over dyadic box sizes,
/// counting boxes holding at least mass_threshold times the uniform share.
BoxDimEstimate box_dimension(const GridMeasure& mu, int num_scales, double mass_threshold,
                             const std::vector<std::uint8_t>* cell_mask = nullptr);

/// Cell marked iff its (rationalized) polar lies outside the wave cone; the
/// weak structure theorem predicts full dimension on the marked set.
std::vector<std::uint8_t> wave_cone_mask(const FirstOrderOperator& op, const VectorGridMeasure& mu);

/// Per-cell dim of the invariance space of the rationalized polar; -1 on
/// cells without mass.
std::vector<int> pointwise_invariance_dim(const FirstOrderOperator& op, const VectorGridMeasure& mu);

}  // namespace wavecone
