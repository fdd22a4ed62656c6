#pragma once

#include "martin/core.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace martin::levelset {

enum class Verdict { convex, non_convex, inconclusive };

std::string to_string(Verdict v);

/// p and q lie in the region, their midpoint does not.
struct Witness {
  Vec2 p;
  Vec2 q;
  Vec2 mid;
};

struct ConvexityReport {
  Verdict verdict = Verdict::inconclusive;
  double hull_deviation = 0.0;
  double threshold = 0.0;
  std::optional<Witness> witness;
  /// Max of the tangent Hessian form over sampled level points; NaN when not computed.
  double tangent_form_max = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

/// Membership test for the (open) region whose convexity is being tested.
using RegionPredicate = std::function<bool(const Vec2&)>;

/// Hull-based convexity test for a sampled region boundary.
///
/// The deviation is the largest distance from a sample to the boundary of the
/// samples' convex hull. Verdicts: convex if deviation <= tol, inconclusive up
/// to 2 tol, non-convex beyond. A non-convex verdict searches a midpoint witness
/// with `inside`; when none can be certified the verdict drops to inconclusive.
ConvexityReport convexity_test(const std::vector<Vec2>& boundary, double tol,
                               const RegionPredicate& inside);

/// Convexity of a set of lattice nodes (spacing h, common origin).
///
/// Deviation is the depth, measured from the hull boundary, of the deepest
/// lattice node inside the hull that is missing from the set. Witnesses are
/// lattice pairs symmetric about such a node.
ConvexityReport lattice_convexity_test(const std::vector<Vec2>& nodes, double h, double tol);

}  // namespace martin::levelset
