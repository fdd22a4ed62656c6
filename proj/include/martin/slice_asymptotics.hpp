#pragma once

#include "martin/convexity.hpp"
#include "martin/fields.hpp"
#include "martin/geometry.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace martin::slices {

using fields::CylinderMode;
using fields::ScalarField;
using geometry::NamedDomain;
using geometry::WindowBox;

struct SliceOptions {
  /// Unbounded slices are clipped to |Y| <= half_width_limit.
  double half_width_limit = 8.0;
  double position_tol = 1e-8;
};

struct RayVerdict {
  Vec direction;
  int steps = 0;
  double extent = 0.0;
  bool strictly_decreasing = true;
  /// Transverse position where u first failed to decrease.
  std::optional<Vec> first_violation;
};

struct SliceReport {
  double t = 0.0;
  /// Maximizers within 1e-12 relative of M (symmetric ties are all listed).
  std::vector<Vec> argmax;
  double M = 0.0;
  /// u(t, 0); NaN when (t, 0) is not in the domain.
  double center_value = 0.0;
  int samples = 0;
  std::vector<RayVerdict> rays;
};

/// Dense sampling of theta_t plus golden-section (d = 1) or compass (d >= 2)
/// refinement around the best samples. Rays in +-Y (d = 1) or 8 directions
/// (d = 2) are checked when (t, 0) is in the domain.
SliceReport slice_scan(const ScalarField& field, double t, int n_samples, const SliceOptions& opts = {});

/// u sampled at k R / n_steps, k = 0..n_steps-1, from (t, 0) toward the slice
/// boundary at distance R. A step fails when u_{k+1} > u_k - 1e-12 scale.
RayVerdict ray_monotonicity(const ScalarField& field, double t, const Vec& direction, int n_steps = 512,
                            const SliceOptions& opts = {});

struct SuperharmonicityReport {
  double t = 0.0;
  /// min over slice samples of d_tt u (= -Laplacian_Y u for harmonic u);
  /// positive means u restricted to the slice is superharmonic.
  double min_dtt = 0.0;
  Vec argmin;
  int samples = 0;
  int skipped = 0;
};

SuperharmonicityReport slice_superharmonicity(const ScalarField& field, double t, int n_samples,
                                              const SliceOptions& opts = {});

/// Smallest t in the (increasing) grid from which every later slice has min d_tt u > 0.
std::optional<double> superharmonicity_onset(const ScalarField& field, const std::vector<double>& ts,
                                             int n_samples, const SliceOptions& opts = {});

struct RescaleResult {
  double s = 0.0;
  double M = 0.0;
  double v_at_origin = 0.0;
  double fitted_A = 0.0;
  double fitted_B = 0.0;
  /// sup over lattice points of S_s ∩ K of |v_s - v| (v zero outside the cylinder).
  double sup_error = 0.0;
  double hausdorff = 0.0;
  int lattice_points = 0;
};

/// v_s(xi) = u(f(s) xi + s e1) / M(s) on a lattice of K (d = 1), compared with
/// the cylinder mode whose (A, B) >= 0 are fitted by least squares on Y = 0.
RescaleResult rescale_and_compare(const ScalarField& field, double s, const WindowBox& K, const CylinderMode& mode,
                                  int lattice = 41, const SliceOptions& opts = {});

/// d_H between lateral boundaries of S_s ∩ K and C ∩ K (d = 1).
double rescaled_hausdorff(const NamedDomain& domain, double s, const WindowBox& K, int n = 2001);

struct DecayFit {
  std::vector<double> radii;
  std::vector<double> values;
  double slope = 0.0;
  double intercept = 0.0;
  /// RMS of the log-log residual.
  double residual = 0.0;
};

/// Least-squares slope of log g against log r. Needs >= 4 radii spanning a
/// factor >= 8; throws std::domain_error on nonpositive or non-finite samples.
DecayFit decay_fit(const std::function<double(double)>& g, const std::vector<double>& radii);

/// n radii geometrically spaced from a to b.
std::vector<double> geometric_radii(double a, double b, int n);

/// |d^k/dz^k (z^2 - sqrt(z^4 - 1))| at z = r e^{i angle}, k = 1 or 2.
double gap_derivative_magnitude(int order, double r, double angle = 0.0);

struct TangentFormAsymptotic {
  DecayFit fit;
  /// Largest scanned radius on the ray where T_u* H_u T_u >= 0; NaN if none.
  double last_nonnegative_radius = 0.0;
};

/// Fit of |T_u* H_u T_u + 8 v| along the ray z = r e^{i angle}, with analytic
/// Hessians of u = slit-sector Martin function and v = Re z^2.
TangentFormAsymptotic tangent_form_asymptotic(const std::vector<double>& radii, double angle = 0.0);

struct ThresholdOptions {
  /// Window [0, X] x [-X, X] with X = scale sqrt(c + 1) + offset, spacing X / cells.
  double window_scale = 1.6;
  double window_offset = 1.5;
  int cells = 400;
};

struct ThresholdEntry {
  double c = 0.0;
  levelset::ConvexityReport report;
};

struct ThresholdResult {
  std::optional<double> c_nonconvex;  // largest tested non-convex level
  std::optional<double> c_convex;     // smallest convex level above it
  std::vector<ThresholdEntry> entries;
};

/// Runs level-set extraction and the convexity test per level. Throws
/// std::runtime_error when every verdict is inconclusive.
ThresholdResult convexity_threshold(const ScalarField& field, const std::vector<double>& c_grid,
                                    const ThresholdOptions& opts = {});

}  // namespace martin::slices
