#include "martin/green.hpp"

#include <doctest.h>

#include <cmath>

using namespace martin;
using namespace martin::green;
using geometry::ConvexBody;

TEST_SUITE("green") {

TEST_CASE("grid mask") {
  const auto g = build_grid(NamedDomain::strip(), WindowBox::planar(0.0, 2.0, -kHalfPi, kHalfPi), kPi / 40.0);
  CHECK(g->nx() == static_cast<int>(std::floor(2.0 / (kPi / 40.0) + 1e-9)) + 1);
  CHECK(g->ny() == 41);
  for (long f = 0; f < g->size(); ++f) {
    const Vec2 p = g->node(f);
    const long i = f % g->nx(), j = f / g->nx();
    const bool off_edge = i > 0 && j > 0 && i + 1 < g->nx() && j + 1 < g->ny();
    const bool inside = off_edge && p.x() > 0.0 && std::abs(p.y()) < kHalfPi - 1e-12;
    if (inside) {
      CHECK(g->kind(f) == NodeKind::interior);
    } else {
      CHECK(g->kind(f) != NodeKind::interior);
    }
  }
  // corners have no interior 4-neighbour
  CHECK(g->kind(g->flat(0, 0)) == NodeKind::exterior);
  CHECK(g->kind(g->flat(0, 1)) == NodeKind::boundary);
  const auto snapped = g->snap(Vec2(1.0, 0.01));
  REQUIRE(snapped);
  CHECK((g->node(*snapped) - Vec2(1.0, 0.01)).norm() <= g->h());
  CHECK_FALSE(g->snap(Vec2(5.0, 0.0)));
}

TEST_CASE("grid validation") {
  CHECK_THROWS(build_grid(NamedDomain::strip(), WindowBox::planar(0.0, 2.0, -kHalfPi, kHalfPi), 0.5));
  CHECK_THROWS(build_grid(NamedDomain::strip(), WindowBox::planar(-3.0, -1.0, -1.0, 1.0), 0.05));
  // the slit does not disconnect the sector, but a ring window inside the hole has no interior
  const auto ring = NamedDomain::convex_ring(ConvexBody::square(2.0), ConvexBody::square(0.5));
  CHECK_THROWS(build_grid(ring, WindowBox::planar(-0.4, 0.4, -0.4, 0.4), 0.01));
}

TEST_CASE("quadratic with constant source is reproduced exactly") {
  const auto g = build_grid(NamedDomain::whole_space(), WindowBox::planar(-1.0, 1.0, -1.0, 1.0), 1.0 / 32.0);
  std::vector<double> bnd;
  for (const long f : g->boundary_nodes()) bnd.push_back(-g->node(f).squaredNorm());
  const std::vector<double> src(g->interior_nodes().size(), 4.0);
  const auto u = solve_dirichlet(g, bnd, src, {.rel_tol = 1e-14});
  double err = 0.0;
  for (const long f : g->interior_nodes()) err = std::max(err, std::abs(u.at(f) + g->node(f).squaredNorm()));
  CHECK(err < 1e-10);
  CHECK(u.stats().iterations > 0);
  // bilinear interpolation of a bilinear function is exact
  CHECK(u.value(Vec(Vec2(0.0, 0.0))) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("solver reports exhaustion") {
  const auto g = build_grid(NamedDomain::whole_space(), WindowBox::planar(0.0, 1.0, 0.0, 1.0), 1.0 / 64.0);
  const std::vector<double> bnd(g->boundary_nodes().size(), 1.0);
  const std::vector<double> src(g->interior_nodes().size(), 1.0);
  CHECK_THROWS_AS(solve_dirichlet(g, bnd, src, {.rel_tol = 1e-14, .max_iterations = 3}), SolverError);
  CHECK_THROWS(solve_dirichlet(g, std::vector<double>(3, 0.0), src));
}

TEST_CASE("discrete Green function is positive and symmetric") {
  const auto g = build_grid(NamedDomain::strip(), WindowBox::planar(0.0, 4.0, -kHalfPi, kHalfPi), kPi / 40.0);
  const Vec2 a(1.0, 0.3), b(2.5, -0.2);
  const long na = *g->snap(a), nb = *g->snap(b);
  const auto Ga = green_function(g, a), Gb = green_function(g, b);
  CHECK(Ga.at(nb) > 0.0);
  CHECK(std::abs(Ga.at(nb) - Gb.at(na)) <= 1e-9 * Ga.at(nb));
  for (const long f : g->interior_nodes()) CHECK(Ga.at(f) > 0.0);
  CHECK_THROWS(green_function(g, Vec2(0.0, 0.0)));
}

TEST_CASE("truncation windows") {
  const MartinApproxConfig cfg;
  const double h = 0.1;
  const auto w = truncation_window(NamedDomain::strip(), 4.0, h, cfg);
  CHECK(w.upper[0] == doctest::Approx(8.0));
  // lateral edges are rounded out to the lattice
  CHECK(w.upper[1] >= kHalfPi);
  CHECK(w.upper[1] < kHalfPi + h);
  const auto s = truncation_window(NamedDomain::sector(), 4.0, h, cfg);
  CHECK(s.upper[1] == doctest::Approx(8.0));
  const auto e = truncation_window(NamedDomain::halfplane_minus_disk(), 4.0, h, cfg);
  CHECK(e.upper[1] == doctest::Approx(8.0));
  CHECK(std::remainder(e.upper[0], h) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("Green ratio on a coarse strip grid") {
  MartinApproxConfig cfg;
  cfg.poles = {3.0, 4.0};
  cfg.probe = WindowBox::planar(0.5, 1.5, -0.8, 0.8);
  const auto res = martin_ratio(NamedDomain::strip(), cfg, kPi / 40.0);
  REQUIRE(res.iterates.size() == 2);
  CHECK(res.cauchy.size() == 1);
  CHECK(res.iterates[1].ratio->value(Vec(cfg.x0)) == doctest::Approx(1.0));
  double worst = 0.0;
  for (const auto& p : res.probe_values)
    worst = std::max(worst, std::abs(p.value - std::sinh(p.point.x()) * std::cos(p.point.y()) / std::sinh(0.5)));
  CHECK(worst < 0.05);
  CHECK(res.probe_nx * res.probe_ny == static_cast<int>(res.probe_values.size()));
  // superlevel of the iterate
  const auto sup = superlevel_of_iterate(res.iterates[1], 2.0, cfg.probe);
  CHECK_FALSE(sup.empty());
  for (const auto& p : sup) CHECK(std::sinh(p.x()) * std::cos(p.y()) / std::sinh(0.5) > 1.8);
  CHECK(superlevel_of_iterate(res.iterates[1], 1e6, cfg.probe).empty());
}

TEST_CASE("Green ratio argument validation") {
  MartinApproxConfig cfg;
  cfg.poles = {0.5, 1.0};
  CHECK_THROWS_AS(martin_ratio(NamedDomain::strip(), cfg, kPi / 40.0), std::invalid_argument);
  cfg.poles = {};
  CHECK_THROWS_AS(martin_ratio(NamedDomain::strip(), cfg, kPi / 40.0), std::invalid_argument);
  cfg.poles = {4.0, 3.0};
  CHECK_THROWS_AS(martin_ratio(NamedDomain::strip(), cfg, kPi / 40.0), std::invalid_argument);
}

TEST_CASE("convex ring harmonic measure") {
  const auto ring = NamedDomain::convex_ring(ConvexBody::square(2.0), ConvexBody::square(0.5));
  const auto u = convex_ring_solution(ring, 0.1);
  const auto& g = u.grid();
  for (const long f : g.interior_nodes()) {
    CHECK(u.at(f) > 0.0);
    CHECK(u.at(f) < 1.0);
  }
  // symmetric under y -> -y and x <-> y
  CHECK(u.value(Vec(Vec2(1.0, 0.3))) == doctest::Approx(u.value(Vec(Vec2(1.0, -0.3)))));
  CHECK(u.value(Vec(Vec2(1.0, 0.3))) == doctest::Approx(u.value(Vec(Vec2(0.3, 1.0)))));
  CHECK_THROWS(convex_ring_solution(NamedDomain::strip(), 0.1));
}

}
