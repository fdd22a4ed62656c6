#include "martin/slice_asymptotics.hpp"

#include <doctest.h>

#include <cmath>

using namespace martin;
using namespace martin::slices;

TEST_SUITE("slices") {

TEST_CASE("strip slices peak on the axis") {
  const fields::StripMartin u;
  const auto rep = slice_scan(u, 1.5, 201);
  REQUIRE(rep.argmax.size() == 1);
  CHECK(std::abs(rep.argmax[0][1]) < 1e-8);
  CHECK(rep.M == doctest::Approx(std::sinh(1.5)));
  CHECK(rep.center_value == doctest::Approx(std::sinh(1.5)));
  REQUIRE(rep.rays.size() == 2);
  CHECK(rep.rays[0].strictly_decreasing);
  CHECK(rep.rays[1].strictly_decreasing);
  CHECK(rep.rays[0].extent == doctest::Approx(kHalfPi));
}

TEST_CASE("exterior slices peak at the clip") {
  const fields::ExteriorMartin u;
  const auto rep = slice_scan(u, 2.0, 401);
  // u(2, y) = 2 - 2/(4 + y^2) increases in |y|; ties at both ends
  CHECK(rep.argmax.size() == 2);
  for (const auto& a : rep.argmax) CHECK(std::abs(a[1]) == doctest::Approx(8.0));
  CHECK(rep.M == doctest::Approx(2.0 - 2.0 / 68.0));
  const auto ray = ray_monotonicity(u, 2.0, Vec::Ones(1));
  CHECK_FALSE(ray.strictly_decreasing);
  REQUIRE(ray.first_violation);
  CHECK((*ray.first_violation)[0] == doctest::Approx(8.0 / 512.0));
  CHECK(ray.steps == 512);
}

TEST_CASE("exterior slice tangent to the unit circle") {
  const auto rep = slice_scan(fields::ExteriorMartin(), 1.0, 101);
  CHECK(std::isnan(rep.center_value));
  CHECK(rep.rays.empty());
  CHECK(rep.M == doctest::Approx(1.0 - 1.0 / 65.0));
}

TEST_CASE("slit sector slice avoids the slit") {
  const fields::SlitSectorMartin u;
  const auto rep = slice_scan(u, 0.5, 201);
  CHECK(std::isnan(rep.center_value));
  CHECK(rep.rays.empty());
  CHECK(rep.M > 0.0);
}

TEST_CASE("superharmonicity on slices") {
  // d_tt of sinh(t) cos(y) is u itself, positive inside
  const auto rep = slice_superharmonicity(fields::StripMartin(), 1.0, 101);
  CHECK(rep.min_dtt > 0.0);
  CHECK(rep.samples > 0);
  // d_tt (x - x/r^2) = -2x(x^2 - 3y^2)/r^6... negative near the axis for the exterior
  const auto ext = slice_superharmonicity(fields::ExteriorMartin(), 2.0, 101);
  CHECK(ext.min_dtt < 0.0);
  CHECK(superharmonicity_onset(fields::StripMartin(), {0.5, 1.0, 2.0}, 51) == doctest::Approx(0.5));
}

TEST_CASE("rescaling the strip toward its cylinder mode") {
  const auto K = WindowBox::planar(-2.0, 2.0, -2.0, 2.0);
  const auto mode = fields::CylinderMode::make(1, 1.0, 0.0);
  const auto r = rescale_and_compare(fields::StripMartin(), 8.0, K, mode);
  CHECK(r.v_at_origin == doctest::Approx(1.0));
  CHECK(r.sup_error < 1e-4);
  CHECK(r.fitted_A > 0.9);
  CHECK(r.lattice_points > 0);
  CHECK(r.hausdorff < 1e-9);
}

TEST_CASE("rescaled Hausdorff distance") {
  const auto dom = geometry::NamedDomain::profile(geometry::ProfileDomain(
      geometry::Profile::from_name("sqrt"), geometry::ConvexBody::interval(-1.0, 1.0)));
  const auto K = WindowBox::planar(-2.0, 2.0, -2.0, 2.0);
  const double d = rescaled_hausdorff(dom, 100.0, K);
  // radius sqrt(1 + t/10) deviates most at t = -2
  CHECK(d == doctest::Approx(1.0 - std::sqrt(0.8)).epsilon(0.01));
  CHECK(rescaled_hausdorff(geometry::NamedDomain::strip(), 50.0, K) < 1e-12);
}

TEST_CASE("decay fits") {
  const auto radii = geometric_radii(1.0, 100.0, 5);
  CHECK(radii.front() == doctest::Approx(1.0));
  CHECK(radii.back() == doctest::Approx(100.0));
  CHECK(radii[2] == doctest::Approx(10.0));
  const auto fit = decay_fit([](double r) { return 3.0 * std::pow(r, -2.5); }, radii);
  CHECK(fit.slope == doctest::Approx(-2.5));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
  CHECK(fit.residual < 1e-12);
  CHECK_THROWS(decay_fit([](double) { return 1.0; }, geometric_radii(1.0, 2.0, 5)));
  CHECK_THROWS(decay_fit([](double) { return 1.0; }, geometric_radii(1.0, 100.0, 3)));
  CHECK_THROWS(decay_fit([](double) { return -1.0; }, radii));
}

TEST_CASE("gap derivative magnitudes") {
  // g ~ 1/(2 z^2), so |g'| ~ r^{-3} and |g''| ~ 3 r^{-4}
  CHECK(gap_derivative_magnitude(1, 100.0) * 1e6 == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(gap_derivative_magnitude(2, 100.0) * 1e8 == doctest::Approx(3.0).epsilon(1e-3));
  CHECK_THROWS(gap_derivative_magnitude(3, 10.0));
}

TEST_CASE("tangent form asymptotics") {
  const auto tf = tangent_form_asymptotic(geometric_radii(5.0, 80.0, 12));
  CHECK(tf.fit.slope == doctest::Approx(-2.0).epsilon(0.01));
  const auto near = tangent_form_asymptotic(geometric_radii(1.05, 10.0, 24));
  CHECK(near.last_nonnegative_radius == doctest::Approx(1.3137).epsilon(0.02));
}

TEST_CASE("convexity threshold brackets") {
  const auto th = convexity_threshold(fields::SlitSectorMartin(), {0.05, 0.5, 1.0, 5.0});
  REQUIRE(th.c_nonconvex);
  REQUIRE(th.c_convex);
  CHECK(*th.c_nonconvex == doctest::Approx(0.5));
  CHECK(*th.c_convex == doctest::Approx(1.0));
  CHECK(th.entries.size() == 4);
}

}
