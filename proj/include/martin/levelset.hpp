#pragma once

#include "martin/convexity.hpp"
#include "martin/fields.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace martin::levelset {

using fields::ScalarField;
using geometry::WindowBox;

/// Polyline on {u = c} inside a planar window.
struct LevelCurve {
  double level = 0.0;
  std::vector<Vec2> points;
  bool closed = false;
  WindowBox window = WindowBox::planar(0, 1, 0, 1);
  double h = 0.0;
};

/// u where the domain contains p, 0 elsewhere (Martin functions vanish on the boundary).
double zero_extended(const ScalarField& field, const Vec2& p);

/// Marching squares on the lattice window.lower + (i h, j h) with the field
/// zero-extended outside its domain. Edge crossings are placed by linear
/// interpolation and then polished on the edge with a bracketing root search.
/// Saddle cells are split by the cell-centre average. Returns an empty list
/// when the level is not crossed.
std::vector<LevelCurve> extract_level_curve(const ScalarField& field, double c, const WindowBox& window,
                                            double h);

/// Window-relative convexity of {u > c} ∩ window from its extracted level curves.
///
/// The sampled boundary is the curve vertices plus window-edge samples (spacing
/// h) where u > c. Default tolerance is 2 h. The report also carries the largest
/// tangent Hessian form over curve vertices where it is defined.
ConvexityReport level_set_convexity(const ScalarField& field, double c, const std::vector<LevelCurve>& curves,
                                    std::optional<double> tol = std::nullopt);

/// First pair with u(p) > c, u(q) > c and u((p+q)/2) <= c (zero-extended), if any.
/// Pairs with an endpoint outside the domain are skipped.
std::optional<Witness> midpoint_witness_search(const ScalarField& field, double c,
                                               const std::vector<std::pair<Vec2, Vec2>>& pairs);

/// In 2D, T* H T with T = (u_y, -u_x). In higher dimensions, the largest
/// eigenvalue of the Hessian restricted to the orthogonal complement of the
/// gradient. Throws std::domain_error at critical points.
double tangent_hessian_form(const ScalarField& field, const Vec& p);

enum class Strictness { strictly_convex_everywhere, nowhere_strict, mixed, inconclusive };

std::string to_string(Strictness s);

struct LevelStrictness {
  double level = 0.0;
  Strictness tag = Strictness::inconclusive;
  int samples = 0;
  int skipped = 0;
  /// Extremes of the form divided by |grad u|^2 (2D) or the raw form (d >= 2).
  double min_form = 0.0;
  double max_form = 0.0;
};

struct StrictnessClassification {
  Strictness overall = Strictness::inconclusive;
  std::vector<LevelStrictness> levels;
};

/// |form| <= 1e-7 (1 + |H|) counts as zero. Level points come from
/// extract_level_curve on the given window and spacing.
StrictnessClassification classify_strictness(const ScalarField& field, const std::vector<double>& levels,
                                             const WindowBox& window, double h, int samples_per_level);

/// A unit direction e with e* H e ≈ 0 and u(p + s e) ≈ u(p) for |s| <= 1 at every sample.
std::optional<Vec> product_direction_detect(const ScalarField& field, const std::vector<Vec>& samples);

}  // namespace martin::levelset
