#include "martin/convexity.hpp"

#include "martin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace martin::levelset {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::convex: return "convex";
    case Verdict::non_convex: return "non_convex";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

struct HullDepth {
  double depth = 0.0;
  size_t edge = 0;
};

// Distance from a point inside a convex CCW polygon to its boundary, with the nearest edge.
HullDepth depth_in_hull(const std::vector<Vec2>& hull, const Vec2& p) {
  HullDepth best{std::numeric_limits<double>::infinity(), 0};
  const size_t n = hull.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % n];
    const Vec2 e = b - a;
    const double d = (e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x())) / e.norm();
    if (d < best.depth) best = {d, i};
  }
  return best;
}

Verdict classify(double deviation, double tol) {
  if (deviation <= tol) return Verdict::convex;
  if (deviation <= 2.0 * tol) return Verdict::inconclusive;
  return Verdict::non_convex;
}

std::optional<Vec2> nudge_inside(const Vec2& anchor, const Vec2& inward, double eps,
                                 const RegionPredicate& inside) {
  if (inside(anchor)) return anchor;
  constexpr int kDirections = 32;
  for (int k = 0; k < kDirections; ++k) {
    const double a = 2.0 * kPi * k / kDirections;
    const Vec2 dir(std::cos(a), std::sin(a));
    if (dir.dot(inward) <= 0.0) continue;
    const Vec2 q = anchor + eps * dir;
    if (inside(q)) return q;
  }
  return std::nullopt;
}

}  // namespace

ConvexityReport convexity_test(const std::vector<Vec2>& boundary, double tol,
                               const RegionPredicate& inside) {
  if (boundary.size() < 8) throw std::invalid_argument("convexity_test: need at least 8 points");
  ConvexityReport report;
  report.threshold = tol;
  const auto hull = geometry::convex_hull(boundary);
  if (hull.size() < 3) {
    report.verdict = Verdict::inconclusive;
    report.note = "degenerate (collinear) input";
    return report;
  }
  HullDepth deepest;
  for (const auto& p : boundary) {
    const auto d = depth_in_hull(hull, p);
    if (d.depth > deepest.depth) deepest = d;
  }
  report.hull_deviation = deepest.depth;
  report.verdict = classify(deepest.depth, tol);
  if (report.verdict != Verdict::non_convex) return report;

  // The hull edge over the deepest dent bridges a pocket outside the region.
  const Vec2 a = hull[deepest.edge];
  const Vec2 b = hull[(deepest.edge + 1) % hull.size()];
  const Vec2 e = (b - a).normalized();
  const Vec2 inward(-e.y(), e.x());
  for (double eps = std::min(0.25 * deepest.depth, 0.1 * (b - a).norm()); eps > 1e-12 * (1.0 + a.norm());
       eps *= 0.25) {
    const auto p = nudge_inside(a, inward, eps, inside);
    const auto q = nudge_inside(b, inward, eps, inside);
    if (!p || !q) continue;
    const Vec2 mid = 0.5 * (*p + *q);
    if (!inside(mid)) {
      report.witness = Witness{*p, *q, mid};
      return report;
    }
  }
  report.verdict = Verdict::inconclusive;
  report.note = "hull deviation exceeds tolerance but no midpoint witness was certified";
  return report;
}

ConvexityReport lattice_convexity_test(const std::vector<Vec2>& nodes, double h, double tol) {
  ConvexityReport report;
  report.threshold = tol;
  if (nodes.size() < 3) {
    report.note = "fewer than three nodes";
    return report;
  }
  const Vec2 origin = nodes.front();
  auto index = [&](const Vec2& p) {
    return std::pair<long, long>{std::lround((p.x() - origin.x()) / h), std::lround((p.y() - origin.y()) / h)};
  };
  auto key = [](long i, long j) { return (static_cast<uint64_t>(i + (1L << 30)) << 32) | static_cast<uint64_t>(j + (1L << 30)); };
  std::unordered_set<uint64_t> present;
  present.reserve(nodes.size() * 2);
  long imin = std::numeric_limits<long>::max(), imax = std::numeric_limits<long>::min();
  long jmin = imin, jmax = imax;
  for (const auto& p : nodes) {
    const auto [i, j] = index(p);
    present.insert(key(i, j));
    imin = std::min(imin, i);
    imax = std::max(imax, i);
    jmin = std::min(jmin, j);
    jmax = std::max(jmax, j);
  }
  const auto hull = geometry::convex_hull(nodes);
  if (hull.size() < 3) {
    report.note = "degenerate (collinear) input";
    return report;
  }
  double worst = 0.0;
  long wi = 0, wj = 0;
  for (long i = imin; i <= imax; ++i) {
    for (long j = jmin; j <= jmax; ++j) {
      if (present.count(key(i, j))) continue;
      const Vec2 p = origin + h * Vec2(static_cast<double>(i), static_cast<double>(j));
      const double d = depth_in_hull(hull, p).depth;
      if (d > worst) {
        worst = d;
        wi = i;
        wj = j;
      }
    }
  }
  report.hull_deviation = worst;
  report.verdict = classify(worst, tol);
  if (report.verdict != Verdict::non_convex) return report;

  const long radius = std::max(imax - imin, jmax - jmin);
  for (long r = 1; r <= radius; ++r) {
    for (long di = -r; di <= r; ++di) {
      for (long dj = -r; dj <= r; ++dj) {
        if (std::max(std::labs(di), std::labs(dj)) != r) continue;
        if (present.count(key(wi + di, wj + dj)) && present.count(key(wi - di, wj - dj))) {
          const Vec2 mid = origin + h * Vec2(static_cast<double>(wi), static_cast<double>(wj));
          report.witness = Witness{mid + h * Vec2(static_cast<double>(di), static_cast<double>(dj)),
                                   mid - h * Vec2(static_cast<double>(di), static_cast<double>(dj)), mid};
          return report;
        }
      }
    }
  }
  report.verdict = Verdict::inconclusive;
  report.note = "no symmetric lattice witness around the deepest missing node";
  return report;
}

}  // namespace martin::levelset
