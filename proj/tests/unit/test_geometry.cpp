#include "martin/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace martin;
using namespace martin::geometry;

TEST_SUITE("geometry") {

TEST_CASE("named domain membership") {
  const auto strip = NamedDomain::strip();
  CHECK(strip.contains(Point(1.0, 0.0)));
  CHECK(strip.contains(Point(0.01, 1.57)));
  CHECK_FALSE(strip.contains(Point(0.0, 0.0)));
  CHECK_FALSE(strip.contains(Point(1.0, kHalfPi)));
  CHECK_FALSE(strip.contains(Point(-1.0, 0.0)));

  const auto ext = NamedDomain::halfplane_minus_disk();
  CHECK(ext.contains(Point(2.0, 1.0)));
  CHECK_FALSE(ext.contains(Point(0.5, 0.5)));
  CHECK_FALSE(ext.contains(Point(1.0, 0.0)));

  const auto slit = NamedDomain::sector_minus_slit();
  CHECK(slit.contains(Point(0.5, 0.1)));
  CHECK_FALSE(slit.contains(Point(0.5, 0.0)));
  CHECK(slit.contains(Point(1.5, 0.0)));
  CHECK_FALSE(slit.contains(Point(1.0, 1.0)));

  CHECK_THROWS_AS(strip.contains(Point(Vec(Vec::Zero(3)))), std::invalid_argument);
}

TEST_CASE("boundary distance on named kinds") {
  CHECK(NamedDomain::strip().boundary_distance(Point(3.0, 0.5)) == doctest::Approx(kHalfPi - 0.5));
  CHECK(NamedDomain::strip().boundary_distance(Point(0.2, 0.0)) == doctest::Approx(0.2));
  CHECK(NamedDomain::halfplane_minus_disk().boundary_distance(Point(3.0, 0.0)) == doctest::Approx(2.0));
  // distance to the slit from above its midpoint
  CHECK(NamedDomain::sector_minus_slit().boundary_distance(Point(0.9, 0.05)) == doctest::Approx(0.05));
}

TEST_CASE("convex body support and containment") {
  const auto sq = ConvexBody::square(1.0);
  Vec e(2);
  e << 1.0, 1.0;
  CHECK(sq.support(e) == doctest::Approx(std::sqrt(2.0)));
  CHECK(sq.contains(Vec::Zero(2)));
  Vec corner(2);
  corner << 1.0, 1.0;
  CHECK_FALSE(sq.contains(corner));
  CHECK(sq.contains_closed(corner));
  const auto iv = ConvexBody::interval(-1.0, 2.0);
  Vec up(1), down(1);
  up << 1.0;
  down << -1.0;
  CHECK(iv.support(up) == doctest::Approx(2.0));
  CHECK(iv.support(down) == doctest::Approx(1.0));
  // polygon support approaches the disc's
  const auto poly = ConvexBody::regular_polygon(256, 1.0);
  Vec dir(2);
  dir << 0.3, -0.7;
  CHECK(poly.support(dir) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("slices") {
  const auto s = slice(NamedDomain::strip(), 2.0);
  REQUIRE(s.intervals.size() == 1);
  CHECK(s.intervals[0].lo == doctest::Approx(-kHalfPi));
  CHECK(s.intervals[0].hi == doctest::Approx(kHalfPi));
  const auto sec = slice(NamedDomain::sector(), 3.0);
  REQUIRE(sec.intervals.size() == 1);
  CHECK(sec.intervals[0].hi == doctest::Approx(3.0));
  // the slit cuts the slice in two for t < 1
  CHECK(slice(NamedDomain::sector_minus_slit(), 0.5).intervals.size() == 2);
  CHECK(slice(NamedDomain::sector_minus_slit(), 1.5).intervals.size() == 1);
  // tangent slices lose the touching point
  CHECK(slice(NamedDomain::sector_minus_slit(), 1.0).intervals.size() == 2);
  CHECK(slice(NamedDomain::halfplane_minus_disk(), 1.0).intervals.size() == 2);
  CHECK(slice(NamedDomain::halfplane_minus_disk(), 1.0 + 1e-9).intervals.size() == 1);
}

TEST_CASE("profile registry and hypotheses") {
  const auto p = Profile::from_name("sqrt");
  CHECK(p.f(4.0) == doctest::Approx(2.0));
  CHECK(p.df(4.0) == doctest::Approx(0.25));
  CHECK(check_profile_hypotheses(p).ok());
  CHECK(check_profile_hypotheses(Profile::from_name("log1p")).ok());
  const auto bad = Profile::custom("cube", [](double t) { return 1.0 + t * t * t; });
  CHECK_FALSE(check_profile_hypotheses(bad).derivative_nonincreasing);
  CHECK_THROWS(ProfileDomain(bad, ConvexBody::interval(-1.0, 1.0)));
  CHECK_THROWS(Profile::from_name("nope"));
}

TEST_CASE("rescaled domain of the square-root profile") {
  const auto dom = NamedDomain::profile(ProfileDomain(Profile::from_name("sqrt"), ConvexBody::interval(-1.0, 1.0)));
  const auto r = rescaled_domain(dom, 400.0);
  CHECK(r.scale == doctest::Approx(20.0));
  CHECK(r.radius(0.0) == doctest::Approx(1.0));
  CHECK(r.radius(2.0) == doctest::Approx(std::sqrt(1.1)));
  CHECK(r.contains(Point(0.0, 0.99)));
  CHECK_FALSE(r.contains(Point(0.0, 1.01)));
}

TEST_CASE("hull, polygon and Hausdorff helpers") {
  const std::vector<Vec2> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}};
  const auto hull = convex_hull(pts);
  CHECK(hull.size() == 4);
  CHECK(polygon_contains(hull, Vec2(0.5, 0.5)));
  CHECK_FALSE(polygon_contains(hull, Vec2(1.5, 0.5)));
  CHECK(segment_distance(Vec2(0.5, 1.0), Vec2(0, 0), Vec2(1, 0)) == doctest::Approx(1.0));
  CHECK(segment_distance(Vec2(2.0, 0.0), Vec2(0, 0), Vec2(1, 0)) == doctest::Approx(1.0));

  const std::vector<Vec2> a = {{0, 0}, {1, 0}}, b = {{0, 0.5}, {1, 0}, {3, 0}};
  // directed sup-inf distances are 0.5 (a->b) and 2 (b->a)
  CHECK(hausdorff_distance(a, b) == doctest::Approx(2.0));
  CHECK(hausdorff_distance(a, a) == 0.0);
}

TEST_CASE("window box") {
  const auto w = WindowBox::planar(0.0, 2.0, -1.0, 1.0);
  CHECK(w.dim() == 2);
  CHECK(w.contains(Vec2(1.0, 0.0)));
  CHECK_FALSE(w.contains(Vec2(3.0, 0.0)));
  CHECK(w.inside(WindowBox::planar(-1.0, 3.0, -2.0, 2.0)));
  CHECK_THROWS(WindowBox::planar(1.0, 0.0, 0.0, 1.0));
}

TEST_CASE("domain json round trip") {
  const auto ring = NamedDomain::convex_ring(ConvexBody::square(2.0), ConvexBody::square(0.5));
  const auto back = NamedDomain::from_json(ring.to_json());
  CHECK(back.kind() == DomainKind::convex_ring);
  CHECK(back.contains(Point(1.0, 1.0)));
  CHECK_FALSE(back.contains(Point(0.0, 0.0)));
  CHECK(NamedDomain::from_json(NamedDomain::strip().to_json()).kind() == DomainKind::strip);
  CHECK_THROWS(NamedDomain::from_json(nlohmann::json{{"kind", "torus"}}));
}

}
