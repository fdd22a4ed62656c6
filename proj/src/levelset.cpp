#include "martin/levelset.hpp"

#include "martin/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace martin::levelset {

double zero_extended(const ScalarField& field, const Vec2& p) {
  const Point pt(p);
  if (!field.domain().contains(pt)) return 0.0;
  try {
    return field.value(pt);
  } catch (const std::domain_error&) {
    return 0.0;  // grid fields near the mask edge
  }
}

namespace {

int lattice_count(double lo, double hi, double h) {
  return static_cast<int>(std::floor((hi - lo) / h + 1e-9)) + 1;
}

// Illinois regula falsi on the segment a-b, where g(a) and g(b) have opposite signs (g > 0 vs g <= 0).
Vec2 polish(const ScalarField& field, double c, Vec2 a, Vec2 b, double ga, double gb) {
  const double ftol = 1e-13 * (1.0 + std::abs(c));
  Vec2 x = a;
  int side = 0;
  for (int it = 0; it < 60; ++it) {
    x = a + (ga / (ga - gb)) * (b - a);
    const double gx = zero_extended(field, x) - c;
    if (std::abs(gx) <= ftol || (b - a).norm() <= 1e-14 * (1.0 + x.norm())) break;
    if ((gx > 0) == (ga > 0)) {
      a = x;
      ga = gx;
      if (side == -1) gb *= 0.5;
      side = -1;
    } else {
      b = x;
      gb = gx;
      if (side == 1) ga *= 0.5;
      side = 1;
    }
  }
  return x;
}

}  // namespace

std::vector<LevelCurve> extract_level_curve(const ScalarField& field, double c, const WindowBox& window,
                                            double h) {
  if (window.dim() != 2 || field.dim() != 2) throw std::invalid_argument("extract_level_curve: planar only");
  if (!(h > 0.0)) throw std::invalid_argument("extract_level_curve: h must be positive");
  const double x0 = window.lower[0], y0 = window.lower[1];
  const int nx = lattice_count(x0, window.upper[0], h);
  const int ny = lattice_count(y0, window.upper[1], h);
  if (nx < 2 || ny < 2) throw std::invalid_argument("extract_level_curve: window smaller than one cell");

  auto node = [&](int i, int j) { return Vec2(x0 + i * h, y0 + j * h); };
  std::vector<double> g(static_cast<size_t>(nx) * ny);
  parallel_for(static_cast<long>(g.size()), thread_count(), [&](long begin, long end) {
    for (long k = begin; k < end; ++k)
      g[static_cast<size_t>(k)] = zero_extended(field, node(static_cast<int>(k % nx), static_cast<int>(k / nx))) - c;
  });
  auto at = [&](int i, int j) { return g[static_cast<size_t>(j) * nx + i]; };

  // Edge ids: horizontal (i,j)-(i+1,j) first, then vertical (i,j)-(i,j+1).
  const long n_horizontal = static_cast<long>(nx - 1) * ny;
  auto hedge = [&](int i, int j) { return static_cast<long>(j) * (nx - 1) + i; };
  auto vedge = [&](int i, int j) { return n_horizontal + static_cast<long>(j) * nx + i; };
  const long n_edges = n_horizontal + static_cast<long>(nx) * (ny - 1);
  auto endpoints = [&](long e, int& i0, int& j0, int& i1, int& j1) {
    if (e < n_horizontal) {
      i0 = static_cast<int>(e % (nx - 1));
      j0 = static_cast<int>(e / (nx - 1));
      i1 = i0 + 1;
      j1 = j0;
    } else {
      const long k = e - n_horizontal;
      i0 = static_cast<int>(k % nx);
      j0 = static_cast<int>(k / nx);
      i1 = i0;
      j1 = j0 + 1;
    }
  };
  auto crosses = [&](long e) {
    int i0, j0, i1, j1;
    endpoints(e, i0, j0, i1, j1);
    return (at(i0, j0) > 0) != (at(i1, j1) > 0);
  };

  std::vector<std::array<long, 2>> adjacency(static_cast<size_t>(n_edges), {-1, -1});
  auto link = [&](long a, long b) {
    for (const auto& [from, to] : {std::pair{a, b}, std::pair{b, a}}) {
      auto& slot = adjacency[static_cast<size_t>(from)];
      (slot[0] < 0 ? slot[0] : slot[1]) = to;
    }
  };

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const long bottom = hedge(i, j), top = hedge(i, j + 1), left = vedge(i, j), right = vedge(i + 1, j);
      std::array<long, 4> hits{};
      int n = 0;
      for (const long e : {bottom, right, top, left})
        if (crosses(e)) hits[static_cast<size_t>(n++)] = e;
      if (n == 2) {
        link(hits[0], hits[1]);
      } else if (n == 4) {
        const bool bl = at(i, j) > 0, tr = at(i + 1, j + 1) > 0;
        const double centre = 0.25 * (at(i, j) + at(i + 1, j) + at(i, j + 1) + at(i + 1, j + 1));
        // Corners bl and tr are cut off when they are the minority sign at the centre.
        const bool isolate_bl_tr = (bl && tr) ? centre <= 0 : centre > 0;
        if (isolate_bl_tr) {
          link(bottom, left);
          link(top, right);
        } else {
          link(bottom, right);
          link(top, left);
        }
      }
    }
  }

  std::vector<Vec2> vertex(static_cast<size_t>(n_edges));
  std::vector<long> crossing;
  for (long e = 0; e < n_edges; ++e)
    if (adjacency[static_cast<size_t>(e)][0] >= 0) crossing.push_back(e);
  parallel_for(static_cast<long>(crossing.size()), thread_count(), [&](long begin, long end) {
    for (long k = begin; k < end; ++k) {
      const long e = crossing[static_cast<size_t>(k)];
      int i0, j0, i1, j1;
      endpoints(e, i0, j0, i1, j1);
      vertex[static_cast<size_t>(e)] = polish(field, c, node(i0, j0), node(i1, j1), at(i0, j0), at(i1, j1));
    }
  });

  std::vector<char> used(static_cast<size_t>(n_edges), 0);
  std::vector<LevelCurve> curves;
  auto walk = [&](long start, bool closed) {
    LevelCurve curve;
    curve.level = c;
    curve.closed = closed;
    curve.window = window;
    curve.h = h;
    long prev = -1, cur = start;
    while (cur >= 0 && !used[static_cast<size_t>(cur)]) {
      used[static_cast<size_t>(cur)] = 1;
      curve.points.push_back(vertex[static_cast<size_t>(cur)]);
      const auto& nb = adjacency[static_cast<size_t>(cur)];
      const long next = nb[0] != prev ? nb[0] : nb[1];
      prev = cur;
      cur = next;
    }
    if (curve.points.size() >= 2) curves.push_back(std::move(curve));
  };
  for (const long e : crossing)
    if (!used[static_cast<size_t>(e)] && adjacency[static_cast<size_t>(e)][1] < 0) walk(e, false);
  for (const long e : crossing)
    if (!used[static_cast<size_t>(e)]) walk(e, true);
  return curves;
}

ConvexityReport level_set_convexity(const ScalarField& field, double c, const std::vector<LevelCurve>& curves,
                                    std::optional<double> tol) {
  ConvexityReport report;
  if (curves.empty()) {
    report.note = "level not attained in window";
    return report;
  }
  const WindowBox& window = curves.front().window;
  const double h = curves.front().h;
  report.threshold = tol.value_or(2.0 * h);

  std::vector<Vec2> boundary;
  double form_max = -std::numeric_limits<double>::infinity();
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      boundary.push_back(p);
      try {
        form_max = std::max(form_max, tangent_hessian_form(field, Vec(p)));
      } catch (const std::exception&) {
      }
    }
  }
  // Window-exit closure: perimeter lattice samples inside the superlevel set.
  const double x0 = window.lower[0], x1 = window.upper[0], y0 = window.lower[1], y1 = window.upper[1];
  const int nx = static_cast<int>(std::ceil((x1 - x0) / h)), ny = static_cast<int>(std::ceil((y1 - y0) / h));
  auto add_edge_sample = [&](const Vec2& p) {
    if (zero_extended(field, p) > c) boundary.push_back(p);
  };
  for (int i = 0; i <= nx; ++i) {
    const double x = std::min(x1, x0 + i * h);
    add_edge_sample({x, y0});
    add_edge_sample({x, y1});
  }
  for (int j = 1; j < ny; ++j) {
    const double y = std::min(y1, y0 + j * h);
    add_edge_sample({x0, y});
    add_edge_sample({x1, y});
  }

  if (boundary.size() < 8) {
    report.note = "fewer than 8 boundary samples";
    return report;
  }
  const auto inside = [&](const Vec2& p) { return window.contains(p) && zero_extended(field, p) > c; };
  report = convexity_test(boundary, report.threshold, inside);
  if (std::isfinite(form_max)) report.tangent_form_max = form_max;
  return report;
}

std::optional<Witness> midpoint_witness_search(const ScalarField& field, double c,
                                               const std::vector<std::pair<Vec2, Vec2>>& pairs) {
  for (const auto& [p, q] : pairs) {
    if (!field.domain().contains(Point(p)) || !field.domain().contains(Point(q))) continue;
    const Vec2 mid = 0.5 * (p + q);
    if (field.value(Vec(p)) > c && field.value(Vec(q)) > c && zero_extended(field, mid) <= c)
      return Witness{p, q, mid};
  }
  return std::nullopt;
}

double tangent_hessian_form(const ScalarField& field, const Vec& p) {
  if (!field.domain().contains(Point(p))) throw std::domain_error("tangent_hessian_form: point outside domain");
  const Vec g = field.gradient(p);
  const double u = field.value(p);
  if (g.norm() < 1e-12 * (1.0 + std::abs(u))) throw std::domain_error("tangent_hessian_form: critical point");
  const Mat H = field.hessian(p);
  if (p.size() == 2) {
    const Vec2 T(g[1], -g[0]);
    return T.dot(H * T);
  }
  // Orthonormal basis of the complement of g: trailing columns of the Householder Q.
  const Eigen::HouseholderQR<Mat> qr{Mat(g)};
  const Mat Q = qr.householderQ();
  const Mat P = Q.rightCols(p.size() - 1);
  const Eigen::SelfAdjointEigenSolver<Mat> eig(P.transpose() * H * P, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

std::string to_string(Strictness s) {
  switch (s) {
    case Strictness::strictly_convex_everywhere: return "strictly_convex_everywhere";
    case Strictness::nowhere_strict: return "nowhere_strict";
    case Strictness::mixed: return "mixed";
    case Strictness::inconclusive: return "inconclusive";
  }
  return "unknown";
}

StrictnessClassification classify_strictness(const ScalarField& field, const std::vector<double>& levels,
                                             const WindowBox& window, double h, int samples_per_level) {
  if (samples_per_level < 1) throw std::invalid_argument("classify_strictness: samples_per_level must be positive");
  StrictnessClassification out;
  for (const double c : levels) {
    LevelStrictness ls;
    ls.level = c;
    std::vector<Vec2> pts;
    for (const auto& curve : extract_level_curve(field, c, window, h))
      pts.insert(pts.end(), curve.points.begin(), curve.points.end());
    const size_t n = std::min<size_t>(pts.size(), static_cast<size_t>(samples_per_level));
    bool all_negative = true, all_zero = true;
    ls.min_form = std::numeric_limits<double>::infinity();
    ls.max_form = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < n; ++k) {
      const Vec p = pts[k * pts.size() / n];
      try {
        const Vec g = field.gradient(p);
        const Mat H = field.hessian(p);
        double form = tangent_hessian_form(field, p);
        if (p.size() == 2) form /= g.squaredNorm();
        const double band = 1e-7 * (1.0 + H.norm());
        all_negative = all_negative && form < -band;
        all_zero = all_zero && std::abs(form) <= band;
        ls.min_form = std::min(ls.min_form, form);
        ls.max_form = std::max(ls.max_form, form);
        ++ls.samples;
      } catch (const std::exception&) {
        ++ls.skipped;
      }
    }
    if (ls.samples < 3) ls.tag = Strictness::inconclusive;
    else if (all_negative) ls.tag = Strictness::strictly_convex_everywhere;
    else if (all_zero) ls.tag = Strictness::nowhere_strict;
    else ls.tag = Strictness::mixed;
    out.levels.push_back(ls);
  }
  if (!out.levels.empty()) {
    out.overall = out.levels.front().tag;
    for (const auto& ls : out.levels)
      if (ls.tag != out.overall) out.overall = Strictness::mixed;
  }
  return out;
}

std::optional<Vec> product_direction_detect(const ScalarField& field, const std::vector<Vec>& samples) {
  if (samples.empty()) return std::nullopt;
  const Eigen::Index n = samples.front().size();
  std::vector<Vec> candidates;
  if (n == 2) {
    for (int k = 0; k < 360; ++k) {
      const double a = kPi * k / 360.0;
      candidates.push_back(Vec2(std::cos(a), std::sin(a)));
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) candidates.push_back(Vec::Unit(n, i));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        for (const double sign : {1.0, -1.0}) candidates.push_back((Vec::Unit(n, i) + sign * Vec::Unit(n, j)).normalized());
  }
  for (const auto& e : candidates) {
    bool ok = true;
    for (const auto& p : samples) {
      if (!ok) break;
      const double u = field.value(p);
      const Mat H = field.hessian(p);
      if (std::abs(e.dot(H * e)) > 1e-7 * (1.0 + H.norm())) {
        ok = false;
        break;
      }
      for (const double s : {-1.0, -0.5, 0.5, 1.0}) {
        const Vec q = p + s * e;
        if (!field.domain().contains(Point(q))) continue;
        if (std::abs(field.value(q) - u) > 1e-9 * (1.0 + std::abs(u))) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return e;
  }
  return std::nullopt;
}

}  // namespace martin::levelset
