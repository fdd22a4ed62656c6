#include "martin/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace martin::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::vector<Vec2> to_planar(const std::vector<Vec>& pts) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.emplace_back(p[0], p[1]);
  return out;
}

// Max over edges of the signed distance to the edge line (outward positive).
double polygon_signed_distance(const std::vector<Vec>& ccw, const Vec2& w) {
  double worst = -kInf;
  const size_t n = ccw.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a(ccw[i][0], ccw[i][1]);
    const Vec2 b(ccw[(i + 1) % n][0], ccw[(i + 1) % n][1]);
    const Vec2 e = b - a;
    const double s = -cross(a, b, w) / e.norm();
    worst = std::max(worst, s);
  }
  return worst;
}

}  // namespace

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

bool polygon_contains(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

// ---------------------------------------------------------------------------
// ConvexBody

ConvexBody::ConvexBody(std::vector<Vec> vertices, bool symmetric) : symmetric_(symmetric) {
  if (vertices.empty()) throw std::invalid_argument("ConvexBody: no vertices");
  dim_ = static_cast<int>(vertices.front().size());
  for (const auto& v : vertices) {
    if (v.size() != dim_) throw std::invalid_argument("ConvexBody: mixed vertex dimensions");
    if (!v.allFinite()) throw std::invalid_argument("ConvexBody: non-finite vertex");
  }
  if (dim_ == 1) {
    double lo = kInf, hi = -kInf;
    for (const auto& v : vertices) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    if (!(lo < 0.0 && 0.0 < hi)) throw std::invalid_argument("ConvexBody: origin not strictly inside");
    vertices_ = {Vec::Constant(1, lo), Vec::Constant(1, hi)};
  } else if (dim_ == 2) {
    const auto hull = convex_hull(to_planar(vertices));
    if (hull.size() < 3) throw std::invalid_argument("ConvexBody: degenerate polygon");
    for (const auto& h : hull) vertices_.push_back(Vec(h));
    if (!(polygon_signed_distance(vertices_, Vec2::Zero()) < 0.0))
      throw std::invalid_argument("ConvexBody: origin not strictly inside");
  } else {
    vertices_ = std::move(vertices);
    for (int i = 0; i < dim_; ++i) {
      const Vec e = Vec::Unit(dim_, i);
      if (!(support(e) > 0.0 && support(-e) > 0.0))
        throw std::invalid_argument("ConvexBody: origin not strictly inside");
    }
  }
  if (symmetric_) {
    double scale = 0.0;
    for (const auto& v : vertices_) scale = std::max(scale, v.norm());
    for (const auto& v : vertices_) {
      const bool has_mirror = std::any_of(vertices_.begin(), vertices_.end(), [&](const Vec& w) {
        return (v + w).norm() <= 1e-12 * scale;
      });
      if (!has_mirror) throw std::invalid_argument("ConvexBody: vertex set not closed under negation");
    }
  }
}

ConvexBody ConvexBody::interval(double lo, double hi) {
  return ConvexBody({Vec::Constant(1, lo), Vec::Constant(1, hi)}, lo == -hi);
}

ConvexBody ConvexBody::square(double half_side) {
  return box(-half_side, half_side, -half_side, half_side);
}

ConvexBody ConvexBody::box(double x0, double x1, double y0, double y1) {
  std::vector<Vec> v = {Vec2(x0, y0), Vec2(x1, y0), Vec2(x1, y1), Vec2(x0, y1)};
  return ConvexBody(std::move(v), x0 == -x1 && y0 == -y1);
}

ConvexBody ConvexBody::regular_polygon(int n, double radius) {
  if (n < 3) throw std::invalid_argument("regular_polygon: n < 3");
  std::vector<Vec> v;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * k / n;
    v.push_back(Vec2(radius * std::cos(a), radius * std::sin(a)));
  }
  return ConvexBody(std::move(v), n % 2 == 0);
}

double ConvexBody::support(const Vec& direction) const {
  if (direction.size() != dim_) throw std::invalid_argument("support: dimension mismatch");
  const double n = direction.norm();
  if (!(n > 0.0)) throw std::invalid_argument("support: zero direction");
  double best = -kInf;
  for (const auto& v : vertices_) best = std::max(best, v.dot(direction) / n);
  return best;
}

bool ConvexBody::contains(const Vec& w) const {
  if (dim_ == 1) return vertices_[0][0] < w[0] && w[0] < vertices_[1][0];
  if (dim_ == 2) return polygon_signed_distance(vertices_, Vec2(w[0], w[1])) < 0.0;
  throw std::invalid_argument("ConvexBody::contains: only d <= 2 supported");
}

bool ConvexBody::contains_closed(const Vec& w) const {
  if (dim_ == 1) return vertices_[0][0] <= w[0] && w[0] <= vertices_[1][0];
  if (dim_ == 2) return polygon_signed_distance(vertices_, Vec2(w[0], w[1])) <= 0.0;
  throw std::invalid_argument("ConvexBody::contains: only d <= 2 supported");
}

double ConvexBody::boundary_distance(const Vec& w) const {
  if (dim_ == 1) return std::min(std::abs(w[0] - vertices_[0][0]), std::abs(w[0] - vertices_[1][0]));
  if (dim_ != 2) throw std::invalid_argument("ConvexBody::boundary_distance: only d <= 2 supported");
  const Vec2 p(w[0], w[1]);
  double best = kInf;
  const size_t n = vertices_.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a(vertices_[i][0], vertices_[i][1]);
    const Vec2 b(vertices_[(i + 1) % n][0], vertices_[(i + 1) % n][1]);
    best = std::min(best, segment_distance(p, a, b));
  }
  return best;
}

ConvexBody ConvexBody::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("ConvexBody::scaled: factor must be positive");
  std::vector<Vec> v;
  for (const auto& x : vertices_) v.push_back(factor * x);
  return ConvexBody(std::move(v), symmetric_);
}

std::vector<Vec> ConvexBody::boundary_samples(double spacing) const {
  if (dim_ == 1) return vertices_;
  if (dim_ != 2) throw std::invalid_argument("ConvexBody::boundary_samples: only d <= 2 supported");
  std::vector<Vec> out;
  const size_t n = vertices_.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec& a = vertices_[i];
    const Vec& b = vertices_[(i + 1) % n];
    const int m = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
    for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / m));
  }
  return out;
}

double support_function(const ConvexBody& body, const Vec& direction) {
  return body.support(direction);
}

// ---------------------------------------------------------------------------
// Profiles

Profile Profile::constant(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("Profile::constant: value must be positive");
  return {"constant:" + std::to_string(c), [c](double) { return c; }, [](double) { return 0.0; },
          false};
}

Profile Profile::from_name(const std::string& name) {
  if (name == "sqrt")
    return {name, [](double t) { return std::sqrt(t); }, [](double t) { return 0.5 / std::sqrt(t); },
            false};
  if (name == "log1p")
    return {name, [](double t) { return std::log1p(t); }, [](double t) { return 1.0 / (1.0 + t); },
            false};
  if (name == "rational")
    return {name, [](double t) { return t / (1.0 + t); },
            [](double t) { return 1.0 / ((1.0 + t) * (1.0 + t)); }, false};
  if (name == "constant") return constant(1.0);
  if (name.rfind("constant:", 0) == 0) return constant(std::stod(name.substr(9)));
  throw std::invalid_argument("unknown profile: " + name);
}

Profile Profile::custom(std::string name, std::function<double(double)> f) {
  auto df = [f](double t) {
    const double h = std::max(1e-5, 1e-5 * std::abs(t));
    const double lo = std::max(t - h, 0.5 * t);
    return (f(t + h) - f(lo)) / (t + h - lo);
  };
  return {std::move(name), std::move(f), std::move(df), true};
}

ProfileHypothesisReport check_profile_hypotheses(const Profile& profile) {
  ProfileHypothesisReport report;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int k = -6; k <= 20; ++k) {
    const double t = std::ldexp(1.0, k);
    if (!(profile.f(t) > 0.0)) report.positive = false;
    const double d = profile.df(t);
    if (!std::isnan(prev) && d > prev + 1e-9) {
      report.derivative_nonincreasing = false;
      report.worst_increase = std::max(report.worst_increase, d - prev);
    }
    prev = d;
  }
  report.derivative_at_infinity = prev;
  return report;
}

ProfileDomain::ProfileDomain(Profile p, ConvexBody d, ProfileKind k)
    : profile(std::move(p)), cross_section(std::move(d)), kind(k) {
  if (kind == ProfileKind::lipschitz_concave_derivative) {
    const auto report = check_profile_hypotheses(profile);
    if (!report.ok())
      throw std::invalid_argument("ProfileDomain: profile '" + profile.name +
                                  "' violates positivity or derivative monotonicity");
  }
}

// ---------------------------------------------------------------------------
// WindowBox

WindowBox::WindowBox(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() < 2)
    throw std::invalid_argument("WindowBox: corner dimensions");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i])) throw std::invalid_argument("WindowBox: empty interior");
}

WindowBox WindowBox::planar(double x0, double x1, double y0, double y1) {
  return WindowBox(Vec2(x0, y0), Vec2(x1, y1));
}

bool WindowBox::contains(const Vec& p, double slack) const {
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (p[i] < lower[i] - slack || p[i] > upper[i] + slack) return false;
  return true;
}

bool WindowBox::inside(const WindowBox& other, double slack) const {
  return other.contains(lower, slack) && other.contains(upper, slack);
}

// ---------------------------------------------------------------------------
// NamedDomain

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::strip: return "strip";
    case DomainKind::sector: return "sector";
    case DomainKind::sector_minus_slit: return "sector_minus_slit";
    case DomainKind::halfplane_minus_disk: return "halfplane_minus_disk";
    case DomainKind::right_halfplane: return "right_halfplane";
    case DomainKind::cylinder: return "cylinder";
    case DomainKind::convex_ring: return "convex_ring";
    case DomainKind::profile: return "profile";
    case DomainKind::whole_space: return "whole_space";
  }
  return "unknown";
}

NamedDomain NamedDomain::strip() { return {DomainKind::strip, 2}; }
NamedDomain NamedDomain::sector() { return {DomainKind::sector, 2}; }
NamedDomain NamedDomain::sector_minus_slit() { return {DomainKind::sector_minus_slit, 2}; }
NamedDomain NamedDomain::halfplane_minus_disk() { return {DomainKind::halfplane_minus_disk, 2}; }
NamedDomain NamedDomain::right_halfplane() { return {DomainKind::right_halfplane, 2}; }

NamedDomain NamedDomain::cylinder(int d) {
  if (d < 1) throw std::invalid_argument("cylinder: d must be >= 1");
  return {DomainKind::cylinder, d + 1};
}

NamedDomain NamedDomain::whole_space(int dim) {
  if (dim < 2) throw std::invalid_argument("whole_space: dimension must be >= 2");
  return {DomainKind::whole_space, dim};
}

NamedDomain NamedDomain::convex_ring(ConvexBody outer, ConvexBody inner) {
  if (outer.dim() != 2 || inner.dim() != 2)
    throw std::invalid_argument("convex_ring: planar bodies required");
  for (const auto& v : inner.vertices())
    if (!outer.contains(v)) throw std::invalid_argument("convex_ring: closure of B must lie inside A");
  NamedDomain d(DomainKind::convex_ring, 2);
  d.ring_ = std::make_shared<const std::pair<ConvexBody, ConvexBody>>(std::move(outer), std::move(inner));
  return d;
}

NamedDomain NamedDomain::profile(ProfileDomain pd) {
  NamedDomain d(DomainKind::profile, pd.cross_section.dim() + 1);
  d.profile_ = std::make_shared<const ProfileDomain>(std::move(pd));
  return d;
}

const ConvexBody& NamedDomain::ring_outer() const {
  if (!ring_) throw std::logic_error("not a convex ring");
  return ring_->first;
}

const ConvexBody& NamedDomain::ring_inner() const {
  if (!ring_) throw std::logic_error("not a convex ring");
  return ring_->second;
}

const ProfileDomain& NamedDomain::profile_domain() const {
  if (!profile_) throw std::logic_error("not a profile domain");
  return *profile_;
}

std::optional<ProfileDomain> NamedDomain::as_profile() const {
  if (kind_ == DomainKind::profile) return *profile_;
  if (kind_ == DomainKind::strip) return ProfileDomain(Profile::constant(kHalfPi), ConvexBody::interval(-1, 1));
  return std::nullopt;
}

namespace {

ConvexBody body_from_json(const nlohmann::json& j) {
  std::vector<Vec> vertices;
  for (const auto& v : j.at("vertices")) {
    if (v.is_number()) {
      vertices.push_back(Vec::Constant(1, v.get<double>()));
    } else {
      const auto c = v.get<std::vector<double>>();
      vertices.push_back(Eigen::Map<const Vec>(c.data(), static_cast<Eigen::Index>(c.size())));
    }
  }
  return ConvexBody(std::move(vertices), j.value("symmetric", false));
}

nlohmann::json body_to_json(const ConvexBody& b) {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& v : b.vertices()) verts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return {{"vertices", verts}, {"symmetric", b.symmetric()}};
}

}  // namespace

NamedDomain NamedDomain::from_json(const nlohmann::json& spec) {
  const auto kind = spec.at("kind").get<std::string>();
  if (kind == "strip") return strip();
  if (kind == "sector") return sector();
  if (kind == "sector_minus_slit") return sector_minus_slit();
  if (kind == "halfplane_minus_disk") return halfplane_minus_disk();
  if (kind == "right_halfplane") return right_halfplane();
  if (kind == "cylinder") return cylinder(spec.value("d", 1));
  if (kind == "whole_space") return whole_space(spec.value("dim", 2));
  if (kind == "convex_ring") return convex_ring(body_from_json(spec.at("A")), body_from_json(spec.at("B")));
  if (kind == "profile") {
    const auto pk = spec.value("profile_kind", std::string("lipschitz-concave-derivative"));
    const auto k = pk == "general" ? ProfileKind::general : ProfileKind::lipschitz_concave_derivative;
    return profile(ProfileDomain(Profile::from_name(spec.at("f").get<std::string>()),
                                 body_from_json(spec.at("D")), k));
  }
  throw std::invalid_argument("unknown domain kind: " + kind);
}

nlohmann::json NamedDomain::to_json() const {
  nlohmann::json j = {{"kind", to_string(kind_)}};
  if (kind_ == DomainKind::cylinder) j["d"] = dim_ - 1;
  if (kind_ == DomainKind::whole_space) j["dim"] = dim_;
  if (kind_ == DomainKind::convex_ring) {
    j["A"] = body_to_json(ring_->first);
    j["B"] = body_to_json(ring_->second);
  }
  if (kind_ == DomainKind::profile) {
    j["f"] = profile_->profile.name;
    j["D"] = body_to_json(profile_->cross_section);
    j["profile_kind"] = profile_->kind == ProfileKind::general ? "general" : "lipschitz-concave-derivative";
  }
  return j;
}

void NamedDomain::check_dim(const Point& p) const {
  if (p.dim() != dim_)
    throw std::invalid_argument("point dimension " + std::to_string(p.dim()) + " does not match " +
                                to_string(kind_) + " dimension " + std::to_string(dim_));
}

bool NamedDomain::contains(const Point& p) const {
  check_dim(p);
  const double x = p[0];
  switch (kind_) {
    case DomainKind::strip: return x > 0.0 && std::abs(p[1]) < kHalfPi;
    case DomainKind::sector: return x > 0.0 && std::abs(p[1]) < x;
    case DomainKind::sector_minus_slit:
      return x > 0.0 && std::abs(p[1]) < x && !(p[1] == 0.0 && x <= 1.0);
    case DomainKind::halfplane_minus_disk: return x > 0.0 && x * x + p[1] * p[1] > 1.0;
    case DomainKind::right_halfplane: return x > 0.0;
    case DomainKind::cylinder: return p.transverse().norm() < 1.0;
    case DomainKind::whole_space: return true;
    case DomainKind::convex_ring: {
      const Vec2 w = p.xy();
      return ring_->first.contains(w) && !ring_->second.contains_closed(w);
    }
    case DomainKind::profile: {
      if (!(x > 0.0)) return false;
      const double f = profile_->profile.f(x);
      return f > 0.0 && profile_->cross_section.contains(p.transverse() / f);
    }
  }
  return false;
}

double NamedDomain::boundary_distance(const Point& p, double spacing) const {
  if (!contains(p)) throw std::invalid_argument("boundary_distance: point outside domain");
  const double x = p[0];
  switch (kind_) {
    case DomainKind::strip: return std::min(x, kHalfPi - std::abs(p[1]));
    case DomainKind::sector: return (x - std::abs(p[1])) / std::sqrt(2.0);
    case DomainKind::sector_minus_slit:
      return std::min((x - std::abs(p[1])) / std::sqrt(2.0),
                      segment_distance(p.xy(), Vec2(0, 0), Vec2(1, 0)));
    case DomainKind::halfplane_minus_disk: {
      const double y = p[1];
      const double arc = std::hypot(x, y) - 1.0;
      const double up = y >= 1.0 ? x : std::hypot(x, y - 1.0);
      const double down = y <= -1.0 ? x : std::hypot(x, y + 1.0);
      return std::min({arc, up, down});
    }
    case DomainKind::right_halfplane: return x;
    case DomainKind::cylinder: return 1.0 - p.transverse().norm();
    case DomainKind::whole_space: return kInf;
    case DomainKind::convex_ring: {
      const Vec2 w = p.xy();
      return std::min(ring_->first.boundary_distance(w), ring_->second.boundary_distance(w));
    }
    case DomainKind::profile: {
      // Sample the lateral surface in t; each slice distance is exact, so the
      // estimate lies in [exact, exact + spacing/2].
      const auto& prof = profile_->profile;
      const auto& body = profile_->cross_section;
      const Vec Y = p.transverse();
      const double fx = prof.f(x);
      double best = fx * body.boundary_distance(Y / fx);
      double rmax = 0.0;
      for (const auto& v : body.vertices()) rmax = std::max(rmax, v.norm());
      const double R = best;
      const double t0 = std::max(0.0, x - R);
      const double t1 = x + R;
      for (double t = t0;;) {
        if (t > 0.0) {
          const double f = prof.f(t);
          if (f > 0.0) best = std::min(best, std::hypot(t - x, f * body.boundary_distance(Y / f)));
        }
        if (t >= t1) break;
        const double slope = t > 0.0 ? std::abs(prof.df(t)) * rmax : 0.0;
        const double dt = std::max(spacing / std::sqrt(1.0 + slope * slope), 1e-12);
        t = std::min(t + dt, t1);
      }
      const double f0 = prof.f(0.0);
      if (std::isfinite(f0) && f0 > 0.0) {
        const Vec w = Y / f0;
        const double cap = body.contains_closed(w) ? x : std::hypot(x, f0 * body.boundary_distance(w));
        best = std::min(best, cap);
      }
      return std::max(0.0, best - 0.5 * spacing);
    }
  }
  return 0.0;
}

std::vector<Vec2> NamedDomain::boundary_samples(const WindowBox& window, int n) const {
  if (dim_ != 2) throw std::invalid_argument("boundary_samples: planar domains only");
  const double x0 = window.lower[0], x1 = window.upper[0];
  const double y0 = window.lower[1], y1 = window.upper[1];
  std::vector<Vec2> out;
  auto segment = [&](const Vec2& a, const Vec2& b) {
    for (int k = 0; k <= n; ++k) {
      const Vec2 q = a + (b - a) * (static_cast<double>(k) / n);
      if (window.contains(q)) out.push_back(q);
    }
  };
  const double xr = std::max(x1, 0.0);
  switch (kind_) {
    case DomainKind::strip:
      segment({0, kHalfPi}, {xr, kHalfPi});
      segment({0, -kHalfPi}, {xr, -kHalfPi});
      segment({0, -kHalfPi}, {0, kHalfPi});
      break;
    case DomainKind::sector:
    case DomainKind::sector_minus_slit:
      segment({0, 0}, {xr, xr});
      segment({0, 0}, {xr, -xr});
      if (kind_ == DomainKind::sector_minus_slit) segment({0, 0}, {1, 0});
      break;
    case DomainKind::halfplane_minus_disk:
      for (int k = 0; k <= n; ++k) {
        const double a = -kHalfPi + kPi * k / n;
        const Vec2 q(std::cos(a), std::sin(a));
        if (window.contains(q)) out.push_back(q);
      }
      segment({0, 1}, {0, std::max(y1, 1.0)});
      segment({0, -1}, {0, std::min(y0, -1.0)});
      break;
    case DomainKind::right_halfplane:
      segment({0, y0}, {0, y1});
      break;
    case DomainKind::cylinder:
      segment({x0, 1}, {x1, 1});
      segment({x0, -1}, {x1, -1});
      break;
    case DomainKind::whole_space:
      break;
    case DomainKind::convex_ring:
      for (const auto* body : {&ring_->first, &ring_->second}) {
        const auto& v = body->vertices();
        for (size_t i = 0; i < v.size(); ++i) segment(Vec2(v[i]), Vec2(v[(i + 1) % v.size()]));
      }
      break;
    case DomainKind::profile: {
      const auto& prof = profile_->profile;
      const double lo = profile_->cross_section.vertices()[0][0];
      const double hi = profile_->cross_section.vertices()[1][0];
      const double ta = std::max(x0, 0.0);
      for (int k = 0; k <= n; ++k) {
        const double t = ta + (xr - ta) * k / n;
        if (!(t > 0.0)) continue;
        const double f = prof.f(t);
        for (const double y : {f * lo, f * hi}) {
          const Vec2 q(t, y);
          if (window.contains(q)) out.push_back(q);
        }
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slices

Slice slice(const NamedDomain& domain, double t) {
  Slice s;
  s.t = t;
  auto need_positive = [&] {
    if (!(t > 0.0)) throw std::invalid_argument("slice: empty slice at t = " + std::to_string(t));
  };
  switch (domain.kind()) {
    case DomainKind::strip:
      need_positive();
      s.intervals = {{-kHalfPi, kHalfPi}};
      break;
    case DomainKind::sector:
      need_positive();
      s.intervals = {{-t, t}};
      break;
    case DomainKind::sector_minus_slit:
      need_positive();
      if (t <= 1.0) {
        s.intervals = {{-t, 0.0}, {0.0, t}};
      } else {
        s.intervals = {{-t, t}};
      }
      break;
    case DomainKind::halfplane_minus_disk:
      need_positive();
      if (t <= 1.0) {  // at t = 1 the circle still removes Y = 0
        const double r = std::sqrt(1.0 - t * t);
        s.intervals = {{-kInf, -r}, {r, kInf}};
      } else {
        s.intervals = {{-kInf, kInf}};
      }
      break;
    case DomainKind::right_halfplane:
      need_positive();
      s.intervals = {{-kInf, kInf}};
      break;
    case DomainKind::whole_space:
      if (domain.dim() != 2) throw std::invalid_argument("slice: whole_space slices only for the plane");
      s.intervals = {{-kInf, kInf}};
      break;
    case DomainKind::cylinder:
      if (domain.dim() == 2) {
        s.intervals = {{-1.0, 1.0}};
      } else {
        s.ball_radius = 1.0;
      }
      break;
    case DomainKind::convex_ring: {
      auto chord = [t](const ConvexBody& body) -> std::optional<Interval> {
        double lo = kInf, hi = -kInf;
        const auto& v = body.vertices();
        for (size_t i = 0; i < v.size(); ++i) {
          const Vec& a = v[i];
          const Vec& b = v[(i + 1) % v.size()];
          if ((a[0] - t) * (b[0] - t) > 0.0) continue;
          if (a[0] == b[0]) {
            lo = std::min({lo, a[1], b[1]});
            hi = std::max({hi, a[1], b[1]});
          } else {
            const double y = a[1] + (t - a[0]) * (b[1] - a[1]) / (b[0] - a[0]);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
          }
        }
        if (!(lo < hi)) return std::nullopt;
        return Interval{lo, hi};
      };
      const auto outer = chord(domain.ring_outer());
      if (!outer) throw std::invalid_argument("slice: empty slice at t = " + std::to_string(t));
      const auto inner = chord(domain.ring_inner());
      if (!inner) {
        s.intervals = {*outer};
      } else {
        s.intervals = {{outer->lo, inner->lo}, {inner->hi, outer->hi}};
      }
      break;
    }
    case DomainKind::profile: {
      need_positive();
      const auto& pd = domain.profile_domain();
      const double f = pd.profile.f(t);
      if (!(f > 0.0)) throw std::invalid_argument("slice: empty slice");
      if (pd.cross_section.dim() == 1) {
        s.intervals = {{f * pd.cross_section.vertices()[0][0], f * pd.cross_section.vertices()[1][0]}};
      } else {
        s.body = pd.cross_section.scaled(f);
      }
      break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Rescaling

double RescaledDomain::radius(double t) const {
  return profile.f(s + t * scale) / scale;
}

bool RescaledDomain::contains(const Point& xi) const {
  if (xi.dim() != cross_section.dim() + 1) throw std::invalid_argument("RescaledDomain: dimension mismatch");
  if (!(std::abs(xi.t()) < axial_half_width)) return false;
  const double r = radius(xi.t());
  return r > 0.0 && cross_section.contains(xi.transverse() / r);
}

std::vector<Vec2> RescaledDomain::lateral_boundary(double w, int n) const {
  std::vector<Vec2> out;
  const double lo = cross_section.vertices()[0][0];
  const double hi = cross_section.vertices()[1][0];
  for (int k = 0; k <= n; ++k) {
    const double t = -w + 2.0 * w * k / n;
    const double r = radius(t);
    out.emplace_back(t, r * lo);
    out.emplace_back(t, r * hi);
  }
  return out;
}

RescaledDomain rescaled_domain(const NamedDomain& domain, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("rescaled_domain: s must be positive");
  auto pd = domain.as_profile();
  if (!pd) throw std::invalid_argument("rescaled_domain: domain has no profile description");
  const double fs = pd->profile.f(s);
  if (!(fs > 0.0)) throw std::invalid_argument("rescaled_domain: f(s) must be positive");
  return {s, fs, s / (2.0 * fs), pd->profile, pd->cross_section};
}

std::vector<Vec2> tube_boundary(const std::function<double(double)>& radius, double w, double y_clip,
                                int n) {
  std::vector<Vec2> out;
  for (int k = 0; k <= n; ++k) {
    const double t = -w + 2.0 * w * k / n;
    const double r = std::min(radius(t), y_clip);
    out.emplace_back(t, r);
    out.emplace_back(t, -r);
  }
  for (const double t : {-w, w}) {
    const double r = std::min(radius(t), y_clip);
    for (int k = 1; k < n; ++k) out.emplace_back(t, -r + 2.0 * r * k / n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hausdorff distance

namespace {

template <class P>
double directed_hausdorff(const std::vector<P>& a, const std::vector<P>& b) {
  double cmax = 0.0;
  for (const auto& p : a) {
    double cmin = kInf;
    for (const auto& q : b) {
      const double d = (p - q).squaredNorm();
      if (d < cmin) {
        cmin = d;
        if (cmin <= cmax) break;
      }
    }
    cmax = std::max(cmax, cmin);
  }
  return std::sqrt(cmax);
}

template <class P>
double hausdorff_impl(const std::vector<P>& a, const std::vector<P>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty input");
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace

double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty input");
  const auto dim = a.front().size();
  for (const auto* cloud : {&a, &b})
    for (const auto& p : *cloud)
      if (p.size() != dim) throw std::invalid_argument("hausdorff_distance: dimension mismatch");
  return hausdorff_impl(a, b);
}

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  return hausdorff_impl(a, b);
}

}  // namespace martin::geometry
