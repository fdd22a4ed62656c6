// Acceptance criteria 1-8: one PASS/FAIL line per criterion.
//
// Reference values come from closed forms evaluated here, independent of the
// library's field classes.

#include "martin/cli.hpp"
#include "martin/fields.hpp"
#include "martin/green.hpp"
#include "martin/io.hpp"
#include "martin/levelset.hpp"
#include "martin/slice_asymptotics.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace martin;
namespace fs = std::filesystem;
using geometry::NamedDomain;
using geometry::WindowBox;
using cld = std::complex<long double>;

namespace oracle {

double strip(double x, double y) { return std::sinh(x) * std::cos(y); }
double exterior(double x, double y) { return x - x / (x * x + y * y); }
double halfplane_v(double x, double y) { return x * x - y * y; }

// g(z) = z^2 - sqrt(z^4 - 1): derivatives written directly, in long double.
long double gap_d1(long double r) {
  const cld z(r, 0.0L), w = std::sqrt(z * z * z * z - 1.0L);
  return std::abs(2.0L * z - 2.0L * z * z * z / w);
}
long double gap_d2(long double r) {
  const cld z(r, 0.0L), w = std::sqrt(z * z * z * z - 1.0L);
  return std::abs(2.0L - 6.0L * z * z / w + 4.0L * z * z * z * z * z * z / (w * w * w));
}

// T* H T for sinh(x) cos(y): -u (sin^2 y + cosh^2 x).
double strip_tangent_form(double x, double y) {
  return -strip(x, y) * (std::sin(y) * std::sin(y) + std::cosh(x) * std::cosh(x));
}

double slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]) / xs.size();
    my += std::log(ys[i]) / xs.size();
  }
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
    sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace oracle

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

// 1. Closed-form harmonicity and boundary vanishing.
Outcome criterion1() {
  Outcome o;
  io::Rng rng(20240601);
  const std::vector<double> hs = {1e-2, 1e-3, 1e-4};
  for (const std::string name : {"strip", "exterior", "slit_sector"}) {
    const WindowBox window = cli::default_window(name);
    const auto field = fields::make_field(name);
    std::vector<Point> pts;
    while (pts.size() < 100) {
      const Point p(rng.uniform(window.lower[0], window.upper[0]), rng.uniform(window.lower[1], window.upper[1]));
      if (field->domain().contains(p) && field->domain().boundary_distance(p) > 0.1) pts.push_back(p);
    }
    std::vector<double> worst;
    for (const double h : hs) {
      double m = 0.0;
      for (const auto& p : pts) m = std::max(m, std::abs(fields::harmonicity_residual(*field, p, h)));
      worst.push_back(m);
    }
    const double order = oracle::slope(hs, worst);
    const auto bnd = fields::boundary_vanishing(*field, window, 200, 1e-8);
    o.detail << " " << name << ": order=" << order << " boundary_max=" << bnd.max_abs << ";";
    o.require(order >= 1.9, name + " order");
    o.require(bnd.max_abs <= 1e-8 && bnd.samples > 0, name + " boundary");
  }
  // The residual matches an independent 5-point stencil of the closed form.
  const auto strip = fields::make_field("strip");
  const long double h = 1e-2L, x = 1.3L, y = 0.4L;
  auto u = [](long double a, long double b) { return std::sinh(a) * std::cos(b); };
  const long double lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4 * u(x, y)) / (h * h);
  o.require(std::abs(static_cast<double>(lap) - fields::harmonicity_residual(*strip, Point(1.3, 0.4), 1e-2)) < 1e-9,
            "stencil cross-check");
  return o;
}

// 2. Green-ratio convergence on the strip.
Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  green::MartinApproxConfig cfg;
  cfg.x0 = Vec2(0.5, 0.0);
  cfg.poles = {4.0, 6.0, 8.0};
  cfg.probe = WindowBox::planar(0.5, 2.0, -1.0, 1.0);
  const auto res = green::martin_ratio(NamedDomain::strip(), cfg, kPi / 200.0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double diff = 0.0, scale = 0.0, pointwise = 0.0;
  for (const auto& s : res.probe_values) {
    const double e = oracle::strip(s.point.x(), s.point.y()) / std::sinh(0.5);
    diff = std::max(diff, std::abs(s.value - e));
    scale = std::max(scale, e);
    pointwise = std::max(pointwise, std::abs(s.value - e) / e);
  }
  const double at1 = res.iterates.back().ratio->value(Vec(Vec2(1.0, 0.0)));
  o.detail << " rel_sup=" << diff / scale << " max_pointwise_rel=" << pointwise << " u(1,0)=" << at1
           << " cauchy=[" << res.cauchy[0] << ", " << res.cauchy[1] << "] time=" << secs << "s";
  o.require(diff / scale <= 0.02 && pointwise <= 0.02, "2% sup-norm");
  o.require(res.cauchy.size() == 2 && res.cauchy[1] < res.cauchy[0], "Cauchy decreasing");
  for (const auto& it : res.iterates)
    o.require(std::abs(it.ratio->value(Vec(cfg.x0)) - 1.0) <= 1e-10, "normalization u_n(x0) = 1");
  o.require(secs <= 300.0, "runtime");
  return o;
}

// 3. Convex ring harness.
Outcome criterion3() {
  Outcome o;
  const auto ring = NamedDomain::convex_ring(geometry::ConvexBody::square(2.0), geometry::ConvexBody::square(0.5));
  const double h = 0.05;
  const auto sol = green::convex_ring_solution(ring, h, {.rel_tol = 1e-12});
  const auto& g = sol.grid();
  double bmin = 1e300, bmax = -1e300, imin = 1e300, imax = -1e300;
  for (const long f : g.boundary_nodes()) {
    bmin = std::min(bmin, sol.at(f));
    bmax = std::max(bmax, sol.at(f));
  }
  for (const long f : g.interior_nodes()) {
    imin = std::min(imin, sol.at(f));
    imax = std::max(imax, sol.at(f));
  }
  o.detail << " interior in [" << imin << ", " << imax << "], boundary in [" << bmin << ", " << bmax << "];";
  o.require(bmin <= imin && imax <= bmax && imin > 0.0 && imax < 1.0, "discrete maximum principle");
  std::vector<Vec2> inner;
  for (long f = 0; f < g.size(); ++f) {
    const Vec2 p = g.node(f);
    if (std::abs(p.x()) <= 0.5 + 1e-12 && std::abs(p.y()) <= 0.5 + 1e-12) inner.push_back(p);
  }
  for (const double c : {0.25, 0.5, 0.75}) {
    auto cloud = inner;
    for (const long f : g.interior_nodes())
      if (sol.at(f) > c) cloud.push_back(g.node(f));
    const auto rep = levelset::lattice_convexity_test(cloud, h, 2.0 * h);
    o.detail << " c=" << c << ": deviation=" << rep.hull_deviation;
    o.require(rep.verdict == levelset::Verdict::convex && rep.hull_deviation <= 2.0 * h, "ring level convex");
  }
  return o;
}

// 4. Strip: convex level curves, tangent form, slice maxima.
Outcome criterion4() {
  Outcome o;
  const auto strip = fields::make_field("strip");
  const auto window = WindowBox::planar(0.0, 3.0, -kHalfPi, kHalfPi);
  const double h = 0.01;
  double worst_form_gap = 0.0, max_form = -1e300;
  for (const double c : {0.5, 1.0, 2.0, 5.0}) {
    const auto curves = levelset::extract_level_curve(*strip, c, window, h);
    const auto rep = levelset::level_set_convexity(*strip, c, curves);
    o.detail << " c=" << c << ":" << levelset::to_string(rep.verdict) << "(dev=" << rep.hull_deviation << ")";
    o.require(!curves.empty() && rep.verdict == levelset::Verdict::convex, "level convex");
    for (const auto& curve : curves) {
      for (const auto& p : curve.points) {
        const double form = levelset::tangent_hessian_form(*strip, Vec(p));
        max_form = std::max(max_form, form);
        worst_form_gap = std::max(worst_form_gap, std::abs(form - oracle::strip_tangent_form(p.x(), p.y())));
      }
    }
  }
  o.detail << "; max_form=" << max_form << " form_gap=" << worst_form_gap << ";";
  o.require(max_form < 0.0, "tangent form negative");
  o.require(worst_form_gap <= 1e-9, "tangent form matches -u(sin^2 y + cosh^2 x)");
  for (const double t : {1.0, 2.0, 5.0}) {
    const auto rep = slices::slice_scan(*strip, t, 401);
    bool centred = !rep.argmax.empty();
    for (const auto& p : rep.argmax) centred = centred && std::abs(p[1]) <= 1e-8;
    bool monotone = rep.rays.size() == 2;
    for (const auto& r : rep.rays) monotone = monotone && r.strictly_decreasing;
    o.detail << " t=" << t << ": M-sinh(t)=" << rep.M - std::sinh(t);
    o.require(centred && std::abs(rep.M - std::sinh(t)) <= 1e-12 * std::sinh(t), "argmax at y=0");
    o.require(monotone, "strict ray monotonicity");
  }
  return o;
}

// 5. Exterior negative control.
Outcome criterion5() {
  Outcome o;
  const auto ext = fields::make_field("exterior");
  for (const double x0 : {1.5, 2.0, 3.0, 5.0}) {
    const double c = oracle::exterior(x0, 0.0);
    std::vector<std::pair<Vec2, Vec2>> pairs;
    for (const double y : {1.0, 0.5, 0.25, 0.1}) pairs.emplace_back(Vec2(x0, y), Vec2(x0, -y));
    const auto w = levelset::midpoint_witness_search(*ext, c, pairs);
    const bool verified = w && oracle::exterior(w->p.x(), w->p.y()) > c && oracle::exterior(w->q.x(), w->q.y()) > c &&
                          oracle::exterior(w->mid.x(), w->mid.y()) <= c;
    o.detail << " x0=" << x0 << ":" << (verified ? "witness" : "none");
    o.require(verified, "witness at x0");
  }
  o.require(std::abs(oracle::exterior(2.0, 1.0) - 1.6) < 1e-15 && std::abs(oracle::exterior(2.0, 0.0) - 1.5) < 1e-15, "u(2,1)=1.6, u(2,0)=1.5");
  const auto rep = slices::slice_scan(*ext, 2.0, 401);
  bool off_axis = !rep.argmax.empty();
  for (const auto& p : rep.argmax) off_axis = off_axis && std::abs(p[1]) > 0.5;
  o.detail << "; t=2 argmax y=" << rep.argmax.front()[1] << " M=" << rep.M << " u(2,0)=" << rep.center_value;
  o.require(off_axis && rep.M > rep.center_value, "argmax off-axis at t=2");
  return o;
}

// 6. Example 3 asymptotics.
Outcome criterion6() {
  Outcome o;
  const auto radii = slices::geometric_radii(5.0, 80.0, 12);
  std::vector<double> d1, d2;
  for (const double r : radii) {
    d1.push_back(static_cast<double>(oracle::gap_d1(r)));
    d2.push_back(static_cast<double>(oracle::gap_d2(r)));
  }
  const auto f1 = slices::decay_fit([](double r) { return slices::gap_derivative_magnitude(1, r); }, radii);
  const auto f2 = slices::decay_fit([](double r) { return slices::gap_derivative_magnitude(2, r); }, radii);
  const double s1 = oracle::slope(radii, d1), s2 = oracle::slope(radii, d2);
  o.detail << " |f'| slope=" << f1.slope << " (oracle " << s1 << "), |f''| slope=" << f2.slope << " (oracle " << s2 << ");";
  o.require(std::abs(f1.slope + 3.0) <= 0.1 && std::abs(s1 + 3.0) <= 0.1, "|f'| slope -3");
  o.require(std::abs(f2.slope + 4.0) <= 0.1 && std::abs(s2 + 4.0) <= 0.1, "|f''| slope -4");
  for (size_t i = 0; i < radii.size(); ++i)
    o.require(std::abs(f1.values[i] - d1[i]) <= 1e-6 * d1[i] && std::abs(f2.values[i] - d2[i]) <= 1e-6 * d2[i],
              "library derivatives match oracle");

  const auto tf = slices::tangent_form_asymptotic(radii);
  o.detail << " residual slope=" << tf.fit.slope << ";";
  o.require(tf.fit.slope <= -1.9, "residual slope <= -1.9");

  const fields::HalfplaneV v;
  io::Rng rng(7);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double x = rng.uniform(0.1, 10.0), y = rng.uniform(-0.99, 0.99) * x;
    worst = std::max(worst, std::abs(levelset::tangent_hessian_form(v, Vec(Vec2(x, y))) + 8.0 * oracle::halfplane_v(x, y)));
  }
  o.detail << " max|T_v*H_vT_v + 8v|=" << worst << ";";
  o.require(worst <= 1e-9, "T_v*H_vT_v = -8v");

  const auto th = slices::convexity_threshold(*fields::make_field("slit_sector"), {0.05, 50.0});
  const auto& low = th.entries[0].report;
  const auto& high = th.entries[1].report;
  o.detail << " c=0.05:" << levelset::to_string(low.verdict) << " c=50:" << levelset::to_string(high.verdict);
  o.require(low.verdict == levelset::Verdict::non_convex && low.witness.has_value(), "Gamma_0.05 non-convex");
  if (low.witness) {
    auto u = [](const Vec2& p) {
      if (!(std::abs(p.y()) < p.x()) || (std::abs(p.y()) < 1e-300 && p.x() <= 1.0)) return 0.0L;
      const cld z(p.x(), p.y());
      return std::real(std::sqrt(z * z * z * z - 1.0L));
    };
    o.require(u(low.witness->p) > 0.05L && u(low.witness->q) > 0.05L && u(low.witness->mid) <= 0.05L,
              "witness re-evaluates");
  }
  o.require(high.verdict == levelset::Verdict::convex, "Gamma_50 convex");
  o.require(th.c_nonconvex && th.c_convex && *th.c_nonconvex < *th.c_convex, "bracket ordered");
  return o;
}

// 7. Rescaling and cylinder modes.
Outcome criterion7() {
  Outcome o;
  for (const auto& [A, B] : {std::pair{1.0, 0.0}, std::pair{1.0, 1.0}, std::pair{0.3, 2.0}}) {
    const auto mode = fields::CylinderMode::make(1, A, B);
    const fields::CylinderMartin cyl(mode);
    const double lambda = kPi * kPi / 4.0;
    double worst = 0.0;
    bool positive = true;
    for (const double t : {-1.5, -0.3, 0.0, 0.7, 2.0}) {
      for (const double y : {-0.9, -0.2, 0.0, 0.5, 0.95}) {
        const double k = kPi / 2.0;
        const double v = (A * std::exp(k * t) + B * std::exp(-k * t)) * std::cos(k * y);
        const double analytic = cyl.hessian(Vec(Vec2(t, y)))(0, 0);
        // fourth-order stencil; the 3-point one loses ~1e-6 to roundoff once v ~ 20
        const double step = 1e-2;
        auto at = [&](double dt) { return cyl.value(Vec(Vec2(t + dt, y))); };
        const double fd = (-at(2 * step) + 16 * at(step) - 30 * at(0) + 16 * at(-step) - at(-2 * step)) /
                          (12 * step * step);
        worst = std::max({worst, std::abs(analytic - lambda * v), std::abs(analytic - fd)});
        positive = positive && analytic > 0.0;
      }
    }
    o.require(worst <= 1e-6 && positive, "d_tt v = lambda v > 0");
    o.detail << " mode(" << A << "," << B << ") gap=" << worst << ";";
  }
  const auto K = WindowBox::planar(-2.0, 2.0, -2.0, 2.0);
  const auto sqrt_domain = NamedDomain::profile(
      geometry::ProfileDomain(geometry::Profile::from_name("sqrt"), geometry::ConvexBody::interval(-1.0, 1.0)));
  std::vector<double> dh;
  for (const double s : {100.0, 400.0, 1600.0}) dh.push_back(slices::rescaled_hausdorff(sqrt_domain, s, K));
  // Analytic value at s = 400: max |sqrt(1 +- 2/sqrt(400)) - 1|.
  const double analytic = std::max(std::abs(std::sqrt(1.1) - 1.0), std::abs(std::sqrt(0.9) - 1.0));
  o.detail << " d_H=[" << dh[0] << ", " << dh[1] << ", " << dh[2] << "] analytic(400)=" << analytic << ";";
  o.require(dh[1] <= 0.052, "d_H at s=400");
  o.require(std::abs(dh[1] - analytic) <= 1e-3, "d_H matches analytic bound");
  o.require(dh[1] <= dh[0] && dh[2] <= dh[1], "d_H non-increasing");

  const auto strip = fields::make_field("strip");
  const auto mode = fields::CylinderMode::make(1, 1.0, 0.0);
  const auto r6 = slices::rescale_and_compare(*strip, 6.0, K, mode);
  const auto r10 = slices::rescale_and_compare(*strip, 10.0, K, mode);
  o.detail << " strip sup_error s=6:" << r6.sup_error << " s=10:" << r10.sup_error << " v(0)=" << r6.v_at_origin << ","
           << r10.v_at_origin;
  o.require(r10.sup_error < r6.sup_error, "strip sup error decreases");
  o.require(r6.v_at_origin <= 1.0 + 1e-12 && r10.v_at_origin <= 1.0 + 1e-12, "v_s(0) <= 1");
  for (const double s : {2.0, 3.0, 4.5, 8.0}) {
    const auto r = slices::rescale_and_compare(*strip, s, K, mode);
    o.require(r.v_at_origin <= 1.0 + 1e-12, "v_s(0) <= 1 for all s");
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 8. Solver infrastructure and output determinism.
Outcome criterion8(const fs::path& config_dir) {
  Outcome o;
  {
    const auto grid = green::build_grid(NamedDomain::strip(), WindowBox::planar(0.0, 8.0, -kHalfPi, kHalfPi), kPi / 100.0);
    const Vec2 a(2.0, 0.0), b(4.0, 0.0);
    const long na = *grid->snap(a), nb = *grid->snap(b);
    const auto Ga = green::green_function(grid, a);
    const auto Gb = green::green_function(grid, b);
    const double gab = Ga.at(nb), gba = Gb.at(na);
    const double rel = std::abs(gab - gba) / std::max(gab, gba);
    o.detail << " green symmetry=" << rel << ";";
    o.require(rel <= 1e-9, "Green symmetry");
  }
  {
    const auto grid = green::build_grid(NamedDomain::whole_space(), WindowBox::planar(0.0, 1.0, 0.0, 1.0), 1.0 / 64.0);
    std::vector<double> data;
    for (const long f : grid->boundary_nodes()) {
      const Vec2 p = grid->node(f);
      data.push_back(p.x() * p.x() - p.y() * p.y());
    }
    const std::vector<double> zero(grid->interior_nodes().size(), 0.0);
    const auto sol = green::solve_dirichlet(grid, data, zero, {.rel_tol = 1e-14});
    double err = 0.0;
    for (const long f : grid->interior_nodes()) {
      const Vec2 p = grid->node(f);
      err = std::max(err, std::abs(sol.at(f) - (p.x() * p.x() - p.y() * p.y())));
    }
    o.detail << " x^2-y^2 max error=" << err << ";";
    o.require(err <= 1e-10, "harmonic polynomial exactness");
  }
  {
    const fs::path root = fs::temp_directory_path() / "martin_acceptance_determinism";
    fs::remove_all(root);
    auto run = [&](const fs::path& dir) {
      std::ostringstream out, err;
      int worst = 0;
      auto call = [&](std::vector<std::string> args) {
        std::vector<const char*> argv = {"martin"};
        for (const auto& a : args) argv.push_back(a.c_str());
        worst = std::max(worst, cli::run(static_cast<int>(argv.size()), argv.data(), out, err));
      };
      const std::string d = dir.string();
      call({"levelsets", "--config", (config_dir / "strip.json").string(), "--out", d});
      call({"levelsets", "--config", (config_dir / "slit_sector.json").string(), "--out", d});
      call({"audit", "--config", (config_dir / "exterior.json").string(), "--out", d, "--seed", "11"});
      call({"green", "--config", (config_dir / "ring.json").string(), "--out", d});
      call({"slice-scan", "--field", "exterior", "--t", "1.5,2,3", "--out", d});
      call({"asymptotics", "--check", "f-decay,hess-residual,v-identity", "--radii", "5:80:12", "--out", d});
      return worst;
    };
    const int e1 = run(root / "a"), e2 = run(root / "b");
    o.require(e1 == 0 && e2 == 0, "CLI runs succeed");
    int compared = 0;
    bool identical = true;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
      const auto ext = entry.path().extension();
      if (ext != ".json" && ext != ".csv") continue;
      ++compared;
      identical = identical && slurp(entry.path()) == slurp(root / "b" / entry.path().filename());
    }
    o.detail << " compared " << compared << " JSON/CSV files";
    o.require(compared >= 8 && identical, "byte-identical outputs");
    fs::remove_all(root);
  }
  return o;
}

int main(int argc, char** argv) {
  const fs::path config_dir = argc > 1 ? fs::path(argv[1]) : fs::path(MARTIN_CONFIG_DIR);
  struct Item {
    int id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items = {
      {1, "closed-form harmonicity and boundary vanishing", criterion1},
      {2, "Green-ratio convergence on the strip", criterion2},
      {3, "convex ring superlevel sets and maximum principle", criterion3},
      {4, "strip level-set convexity, tangent form, slice maxima", criterion4},
      {5, "exterior negative control", criterion5},
      {6, "slit-sector asymptotics and convexity threshold", criterion6},
      {7, "rescaling, cylinder modes, Hausdorff convergence", criterion7},
      {8, "solver symmetry, polynomial exactness, determinism", [&] { return criterion8(config_dir); }},
  };
  int failures = 0;
  for (const auto& item : items) {
    Outcome o;
    try {
      o = item.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << item.id << " [PRIMARY] " << item.title << ": " << (o.pass ? "PASS" : "FAIL") << " |"
              << o.detail.str() << std::endl;
  }
  std::cout << (failures ? "acceptance: FAIL" : "acceptance: PASS") << " (" << 8 - failures << "/8)" << std::endl;
  return failures ? 1 : 0;
}
