#pragma once

#include "martin/core.hpp"

#include <json.hpp>

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace martin::geometry {

/// Bounded convex polytope in R^d given by its vertices, containing the origin.
///
/// In one dimension the body is an interval [min, max]. In two dimensions the
/// vertex list is replaced by its convex hull in counter-clockwise order.
/// Higher dimensions support the support function only.
class ConvexBody {
 public:
  ConvexBody(std::vector<Vec> vertices, bool symmetric);

  static ConvexBody interval(double lo, double hi);
  static ConvexBody square(double half_side);
  static ConvexBody box(double x0, double x1, double y0, double y1);
  /// Regular n-gon inscribed in the circle of given radius (n >= 64 for smooth bodies).
  static ConvexBody regular_polygon(int n, double radius);

  int dim() const { return dim_; }
  const std::vector<Vec>& vertices() const { return vertices_; }
  bool symmetric() const { return symmetric_; }

  /// h_D(xi) = max_v <v, xi>, with xi normalized first.
  double support(const Vec& direction) const;
  bool contains(const Vec& w) const;
  bool contains_closed(const Vec& w) const;
  /// Euclidean distance from w to the boundary of the body (d <= 2).
  double boundary_distance(const Vec& w) const;
  ConvexBody scaled(double factor) const;
  /// Points on the boundary with spacing at most `spacing` (d <= 2).
  std::vector<Vec> boundary_samples(double spacing) const;

 private:
  int dim_ = 0;
  bool symmetric_ = false;
  std::vector<Vec> vertices_;
};

/// Profile function f with derivative. Registry names: sqrt, log1p, rational, constant[:c].
struct Profile {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  bool finite_difference_derivative = false;

  static Profile from_name(const std::string& name);
  /// User profile; the derivative is taken by centered differences.
  static Profile custom(std::string name, std::function<double(double)> f);
  static Profile constant(double c);
};

enum class ProfileKind { lipschitz_concave_derivative, general };

struct ProfileHypothesisReport {
  bool positive = true;
  bool derivative_nonincreasing = true;
  double derivative_at_infinity = 0.0;  // f'(2^20)
  double worst_increase = 0.0;
  bool ok() const { return positive && derivative_nonincreasing; }
};

/// f > 0 and f' non-increasing on the geometric grid t = 2^k, k = -6..20 (tolerance 1e-9).
ProfileHypothesisReport check_profile_hypotheses(const Profile& profile);

struct ProfileDomain {
  Profile profile;
  ConvexBody cross_section;
  ProfileKind kind = ProfileKind::lipschitz_concave_derivative;

  /// Throws if kind == lipschitz_concave_derivative and the sampled hypotheses fail.
  ProfileDomain(Profile p, ConvexBody d, ProfileKind k = ProfileKind::lipschitz_concave_derivative);
};

enum class DomainKind {
  strip,
  sector,
  sector_minus_slit,
  halfplane_minus_disk,
  right_halfplane,
  cylinder,
  convex_ring,
  profile,
  whole_space,
};

std::string to_string(DomainKind kind);

/// Axis-aligned box in R^{d+1}.
struct WindowBox {
  Vec lower;
  Vec upper;

  WindowBox(Vec lo, Vec hi);
  static WindowBox planar(double x0, double x1, double y0, double y1);

  Eigen::Index dim() const { return lower.size(); }
  bool contains(const Vec& p, double slack = 0.0) const;
  bool inside(const WindowBox& other, double slack = 0.0) const;
};

/// One of the named unbounded domains, a convex ring, or a profile domain.
class NamedDomain {
 public:
  static NamedDomain strip();
  static NamedDomain sector();
  static NamedDomain sector_minus_slit();
  static NamedDomain halfplane_minus_disk();
  static NamedDomain right_halfplane();
  static NamedDomain cylinder(int d = 1);
  static NamedDomain whole_space(int dim = 2);
  static NamedDomain convex_ring(ConvexBody outer, ConvexBody inner);
  static NamedDomain profile(ProfileDomain pd);

  static NamedDomain from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;

  DomainKind kind() const { return kind_; }
  int dim() const { return dim_; }
  const ConvexBody& ring_outer() const;
  const ConvexBody& ring_inner() const;
  const ProfileDomain& profile_domain() const;

  /// Profile description of the domain when it has one (profile kind; strip as f = pi/2, D = [-1,1]).
  std::optional<ProfileDomain> as_profile() const;

  /// Open-set membership. Throws on dimension mismatch.
  bool contains(const Point& p) const;
  /// Distance to the boundary. Exact for named kinds; within spacing/2 below exact for profiles.
  double boundary_distance(const Point& p, double spacing = 1e-3) const;

  /// Samples of the boundary inside a planar window (d = 1 only).
  std::vector<Vec2> boundary_samples(const WindowBox& window, int n_per_piece) const;

 private:
  NamedDomain(DomainKind kind, int dim) : kind_(kind), dim_(dim) {}
  void check_dim(const Point& p) const;

  DomainKind kind_;
  int dim_;
  std::shared_ptr<const std::pair<ConvexBody, ConvexBody>> ring_;
  std::shared_ptr<const ProfileDomain> profile_;
};

struct Interval {
  double lo;
  double hi;
};

/// The set theta_t = domain ∩ ({t} x R^d).
struct Slice {
  double t = 0.0;
  std::vector<Interval> intervals;       // d = 1
  std::optional<ConvexBody> body;        // profile domains with d >= 2
  std::optional<double> ball_radius;     // cylinder with d >= 2
};

Slice slice(const NamedDomain& domain, double t);

double support_function(const ConvexBody& body, const Vec& direction);

/// S_s = (Omega ∩ {s/2 < t < 3s/2} - s e1)/f(s).
struct RescaledDomain {
  double s;
  double scale;           // f(s)
  double axial_half_width;
  Profile profile;
  ConvexBody cross_section;

  /// Cross-section scaling at rescaled axial coordinate t: f(s + t f(s)) / f(s).
  double radius(double t) const;
  bool contains(const Point& xi) const;
  /// Lateral boundary samples {(t, ±radius(t))} for |t| <= half_width (d = 1).
  std::vector<Vec2> lateral_boundary(double t_half_width, int n) const;
};

RescaledDomain rescaled_domain(const NamedDomain& domain, double s);

/// Symmetric Hausdorff distance between two point clouds.
double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b);
double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

/// Boundary of {|t| <= w, |Y| < r(t)} clipped to |Y| <= y_clip, sampled with n points per piece.
std::vector<Vec2> tube_boundary(const std::function<double(double)>& radius, double w,
                                double y_clip, int n);

/// Convex hull in counter-clockwise order, collinear points dropped.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);
double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
/// Even-odd rule; the polygon is closed implicitly.
bool polygon_contains(const std::vector<Vec2>& polygon, const Vec2& p);

}  // namespace martin::geometry
