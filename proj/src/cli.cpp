#include "martin/cli.hpp"

#include "martin/green.hpp"
#include "martin/levelset.hpp"
#include "martin/slice_asymptotics.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace martin::cli {

namespace fs = std::filesystem;
using geometry::DomainKind;
using geometry::NamedDomain;
using geometry::WindowBox;
using io::json;

fields::FieldPtr closed_form_for(DomainKind kind) {
  switch (kind) {
    case DomainKind::strip: return fields::make_field("strip");
    case DomainKind::halfplane_minus_disk: return fields::make_field("exterior");
    case DomainKind::sector_minus_slit: return fields::make_field("slit_sector");
    case DomainKind::sector: return fields::make_field("halfplane_v");
    case DomainKind::right_halfplane: return fields::make_field("linear_x");
    default: return nullptr;
  }
}

WindowBox default_window(const std::string& field) {
  if (field == "strip") return WindowBox::planar(0.0, 3.0, -kHalfPi, kHalfPi);
  if (field == "exterior") return WindowBox::planar(0.0, 6.0, -4.0, 4.0);
  if (field == "slit_sector" || field == "halfplane_v") return WindowBox::planar(0.0, 6.0, -6.0, 6.0);
  if (field == "linear_x") return WindowBox::planar(0.0, 4.0, -2.0, 2.0);
  if (field.rfind("cylinder", 0) == 0) return WindowBox::planar(-2.0, 2.0, -1.0, 1.0);
  throw io::ConfigError("no default window for field " + field);
}

std::string CheckResult::outcome() const {
  if (passed && expected) return "passed";
  if (!passed && !expected) return "FAILED-as-expected";
  if (passed) return "unexpectedly-passed";
  return "FAILED";
}

double harmonicity_order(const fields::ScalarField& field, const std::vector<Point>& points,
                         const std::vector<double>& steps) {
  std::vector<double> worst;
  for (const double h : steps) {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, std::abs(fields::harmonicity_residual(field, p, h)));
    worst.push_back(m);
  }
  if (*std::max_element(worst.begin(), worst.end()) <= 1e-10) return std::numeric_limits<double>::infinity();
  double mx = 0, my = 0;
  const double n = static_cast<double>(steps.size());
  for (size_t i = 0; i < steps.size(); ++i) {
    mx += std::log(steps[i]) / n;
    my += std::log(worst[i]) / n;
  }
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < steps.size(); ++i) {
    sxx += (std::log(steps[i]) - mx) * (std::log(steps[i]) - mx);
    sxy += (std::log(steps[i]) - mx) * (std::log(worst[i]) - my);
  }
  return sxy / sxx;
}

namespace {

struct Context {
  io::ExperimentConfig cfg;
  fs::path out_dir;
  std::optional<fs::path> main_file;
  bool verbose = false;
  bool timings = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  fs::path path_for(const std::string& suffix) const {
    return out_dir / (cfg.name + suffix);
  }
  fs::path main_path(const std::string& suffix) const { return main_file ? *main_file : path_for(suffix); }
  void log(const std::string& msg) const {
    if (verbose) *err << "[martin] " << msg << "\n";
  }
};

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw io::ConfigError("cannot parse " + what + ": '" + s + "'");
    }
  }
  return v;
}

// Grid spacing default: a 400-cell span of the window width.
double spacing(const io::ExperimentConfig& cfg, const WindowBox& w) {
  return cfg.h > 0.0 ? cfg.h : (w.upper[0] - w.lower[0]) / 400.0;
}

fields::FieldPtr config_field(const io::ExperimentConfig& cfg) {
  if (cfg.field.empty()) throw io::ConfigError("config needs a field");
  return fields::make_field(cfg.field);
}

WindowBox config_window(const io::ExperimentConfig& cfg) {
  return cfg.window ? *cfg.window : default_window(cfg.field);
}

NamedDomain config_domain(const io::ExperimentConfig& cfg) {
  if (cfg.domain) return NamedDomain::from_json(*cfg.domain);
  if (!cfg.field.empty()) return fields::make_field(cfg.field)->domain();
  throw io::ConfigError("config needs a domain or a field");
}

// Interior sample points with stencil room, placed by the seeded generator.
std::vector<Point> sample_points(const fields::ScalarField& field, const WindowBox& w, int n, double margin,
                                 io::Rng& rng) {
  std::vector<Point> pts;
  for (int attempt = 0; attempt < 1000 * n && static_cast<int>(pts.size()) < n; ++attempt) {
    const Point p(rng.uniform(w.lower[0], w.upper[0]), rng.uniform(w.lower[1], w.upper[1]));
    if (field.domain().contains(p) && field.domain().boundary_distance(p) > margin) pts.push_back(p);
  }
  if (static_cast<int>(pts.size()) < n) throw std::runtime_error("could not place sample points in the window");
  return pts;
}

green::MartinApproxConfig approx_config(const io::GreenConfig& g) {
  green::MartinApproxConfig m;
  m.x0 = g.x0;
  m.poles = g.poles;
  if (g.probe) m.probe = *g.probe;
  m.truncation_factor = g.truncation_factor;
  m.lateral_half_width = g.lateral_half_width;
  m.solver.rel_tol = g.rel_tol;
  return m;
}

struct RatioComparison {
  double rel_sup = std::numeric_limits<double>::quiet_NaN();
  bool cauchy_decreasing = true;
};

RatioComparison compare_ratio(const green::MartinResult& r, const fields::ScalarField* exact, const Vec2& x0) {
  RatioComparison c;
  for (size_t k = 1; k < r.cauchy.size(); ++k) c.cauchy_decreasing = c.cauchy_decreasing && r.cauchy[k] < r.cauchy[k - 1];
  if (exact) {
    const double norm = exact->value(Vec(x0));
    double diff = 0.0, scale = 0.0;
    for (const auto& s : r.probe_values) {
      if (std::isnan(s.value)) continue;
      const double e = exact->value(Vec(s.point)) / norm;
      diff = std::max(diff, std::abs(s.value - e));
      scale = std::max(scale, std::abs(e));
    }
    c.rel_sup = diff / scale;
  }
  return c;
}

json ring_verdicts(const green::GridField& sol, const NamedDomain& ring, const std::vector<double>& levels) {
  const auto& g = sol.grid();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const long f : g.interior_nodes()) {
    lo = std::min(lo, sol.at(f));
    hi = std::max(hi, sol.at(f));
  }
  std::vector<Vec2> inner;
  for (long f = 0; f < g.size(); ++f)
    if (ring.ring_inner().contains_closed(g.node(f))) inner.push_back(g.node(f));
  json per_level = json::array();
  bool all_convex = true;
  for (const double c : levels) {
    std::vector<Vec2> cloud = inner;
    for (const long f : g.interior_nodes())
      if (sol.at(f) > c) cloud.push_back(g.node(f));
    const auto rep = levelset::lattice_convexity_test(cloud, g.h(), 2.0 * g.h());
    all_convex = all_convex && rep.verdict == levelset::Verdict::convex;
    json j = io::to_json(rep);
    j["level"] = c;
    j["nodes"] = cloud.size();
    per_level.push_back(std::move(j));
  }
  const bool max_principle = lo > 0.0 && hi < 1.0;
  return {{"levels", per_level},
          {"interior_min", lo},
          {"interior_max", hi},
          {"maximum_principle", max_principle},
          {"all_convex", all_convex},
          {"iterations", sol.stats().iterations},
          {"rel_residual", sol.stats().rel_residual}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Audit checks

CheckResult run_check(const std::string& name, const io::ExperimentConfig& cfg, io::Rng& rng) {
  CheckResult r;
  r.name = name;
  if (auto it = cfg.expected.find(name); it != cfg.expected.end()) r.expected = it->second;
  json& d = r.details;

  if (name == "harmonicity") {
    const auto field = config_field(cfg);
    const auto pts = sample_points(*field, config_window(cfg), 100, 0.05, rng);
    const double order = harmonicity_order(*field, pts, {1e-2, 1e-3, 1e-4});
    d = {{"order", std::isinf(order) ? json("exact") : json(order)}, {"points", pts.size()}, {"required_order", 1.9}};
    r.passed = order >= 1.9;
  } else if (name == "boundary") {
    const auto field = config_field(cfg);
    const auto rep = fields::boundary_vanishing(*field, config_window(cfg), 200, 1e-8);
    d = {{"max_abs", rep.max_abs}, {"worst", {rep.worst.x(), rep.worst.y()}}, {"samples", rep.samples}};
    r.passed = rep.passed;
  } else if (name == "derivatives") {
    const auto field = config_field(cfg);
    double worst = 0.0;
    for (const auto& p : sample_points(*field, config_window(cfg), 100, 0.05, rng)) {
      const Vec g = field->gradient(p), gf = fields::fd_gradient(*field, p);
      const Mat H = field->hessian(p), Hf = fields::fd_hessian(*field, p);
      worst = std::max({worst, (g - gf).norm() / (1.0 + g.norm()), (H - Hf).norm() / (1.0 + H.norm())});
    }
    d = {{"max_relative_gap", worst}, {"tolerance", 1e-6}};
    r.passed = worst <= 1e-6;
  } else if (name == "convexity") {
    const auto field = config_field(cfg);
    const auto w = config_window(cfg);
    const double h = spacing(cfg, w);
    json levels = json::array();
    r.passed = !cfg.levels.empty();
    for (const double c : cfg.levels) {
      const auto curves = levelset::extract_level_curve(*field, c, w, h);
      const auto rep = levelset::level_set_convexity(*field, c, curves);
      json j = io::to_json(rep);
      j["level"] = c;
      levels.push_back(std::move(j));
      r.passed = r.passed && rep.verdict == levelset::Verdict::convex;
    }
    d = {{"levels", levels}, {"h", h}};
  } else if (name == "strictness") {
    const auto field = config_field(cfg);
    const auto w = config_window(cfg);
    const auto cls = levelset::classify_strictness(*field, cfg.levels, w, spacing(cfg, w), 200);
    json levels = json::array();
    for (const auto& l : cls.levels)
      levels.push_back({{"level", l.level}, {"tag", levelset::to_string(l.tag)}, {"samples", l.samples},
                        {"skipped", l.skipped}, {"min_form", l.min_form}, {"max_form", l.max_form}});
    d = {{"overall", levelset::to_string(cls.overall)}, {"levels", levels}};
    r.passed = cls.overall == levelset::Strictness::strictly_convex_everywhere;
  } else if (name == "slice_maxima") {
    const auto field = config_field(cfg);
    json per = json::array();
    r.passed = !cfg.slice_t.empty();
    for (const double t : cfg.slice_t) {
      const auto rep = slices::slice_scan(*field, t, cfg.slice_samples);
      bool centred = !rep.argmax.empty();
      for (const auto& p : rep.argmax) centred = centred && p.tail(p.size() - 1).norm() <= 1e-8;
      bool monotone = !rep.rays.empty();
      for (const auto& ray : rep.rays) monotone = monotone && ray.strictly_decreasing;
      json j = io::to_json(rep);
      j["argmax_on_axis"] = centred;
      per.push_back(std::move(j));
      r.passed = r.passed && centred && monotone;
    }
    d = {{"slices", per}};
  } else if (name == "superharmonicity") {
    const auto field = config_field(cfg);
    json per = json::array();
    r.passed = !cfg.slice_t.empty();
    for (const double t : cfg.slice_t) {
      const auto rep = slices::slice_superharmonicity(*field, t, cfg.slice_samples);
      per.push_back({{"t", t}, {"min_dtt", rep.min_dtt}, {"argmin", io::to_json(rep.argmin)}, {"samples", rep.samples},
                     {"skipped", rep.skipped}});
      r.passed = r.passed && rep.min_dtt > 0.0;
    }
    const auto onset = slices::superharmonicity_onset(*field, cfg.slice_t, cfg.slice_samples);
    d = {{"slices", per}, {"empirical_onset", onset ? json(*onset) : json(nullptr)}};
  } else if (name == "midpoint_witness") {
    const auto field = config_field(cfg);
    json per = json::array();
    r.passed = !cfg.slice_t.empty();
    for (const double t : cfg.slice_t) {
      const double c = field->value(Vec(Vec2(t, 0.0)));
      std::vector<std::pair<Vec2, Vec2>> pairs;
      for (const double y : {1.0, 0.5, 0.25}) pairs.emplace_back(Vec2(t, y), Vec2(t, -y));
      for (int k = 0; k < 32; ++k) {
        const double y = rng.uniform(0.01, 2.0);
        pairs.emplace_back(Vec2(t, y), Vec2(t, -y));
      }
      const auto w = levelset::midpoint_witness_search(*field, c, pairs);
      json j = {{"t", t}, {"level", c}};
      j["witness"] = w ? json{{"p", {w->p.x(), w->p.y()}}, {"q", {w->q.x(), w->q.y()}}, {"mid", {w->mid.x(), w->mid.y()}}}
                       : json(nullptr);
      per.push_back(std::move(j));
      r.passed = r.passed && w.has_value();
    }
    d = {{"axis_points", per}};
  } else if (name == "green_ratio") {
    if (!cfg.green || cfg.green->mode != "ratio") throw io::ConfigError("green_ratio check needs a green ratio config");
    const auto domain = config_domain(cfg);
    const auto res = green::martin_ratio(domain, approx_config(*cfg.green), cfg.green->h);
    const auto exact = closed_form_for(domain.kind());
    const auto cmp = compare_ratio(res, exact.get(), cfg.green->x0);
    d = {{"cauchy", res.cauchy}, {"cauchy_decreasing", cmp.cauchy_decreasing},
         {"rel_sup_error", exact ? json(cmp.rel_sup) : json(nullptr)}, {"tolerance", 0.02}};
    r.passed = cmp.cauchy_decreasing && (!exact || cmp.rel_sup <= 0.02);
  } else if (name == "ring") {
    if (!cfg.green || cfg.green->mode != "ring") throw io::ConfigError("ring check needs a green ring config");
    const auto domain = config_domain(cfg);
    const auto sol = green::convex_ring_solution(domain, cfg.green->h, {.rel_tol = cfg.green->rel_tol});
    d = ring_verdicts(sol, domain, cfg.green->levels);
    r.passed = d["maximum_principle"].get<bool>() && d["all_convex"].get<bool>();
  } else {
    throw io::ConfigError("unknown check: " + name);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

int cmd_levelsets(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.levels.empty()) throw io::ConfigError("levelsets: level grid is empty");
  const auto field = config_field(cfg);
  const auto window = config_window(cfg);
  const double h = spacing(cfg, window);
  std::vector<levelset::LevelCurve> all;
  json contours = json::array();
  json verdicts = json::array();
  std::vector<std::vector<std::string>> rows;
  for (const double c : cfg.levels) {
    ctx.log("extracting level " + std::to_string(c));
    const auto curves = levelset::extract_level_curve(*field, c, window, h);
    for (size_t k = 0; k < curves.size(); ++k) {
      contours.push_back(io::to_json(curves[k]));
      for (size_t i = 0; i < curves[k].points.size(); ++i)
        rows.push_back({io::csv_number(c), std::to_string(all.size() + k), curves[k].closed ? "true" : "false",
                        std::to_string(i), io::csv_number(curves[k].points[i].x()),
                        io::csv_number(curves[k].points[i].y())});
    }
    json v = io::to_json(levelset::level_set_convexity(*field, c, curves));
    v["level"] = c;
    v["curves"] = curves.size();
    verdicts.push_back(std::move(v));
    all.insert(all.end(), curves.begin(), curves.end());
  }
  const json doc = {{"field", cfg.field}, {"window", io::to_json(window)}, {"h", h},
                    {"contours", contours}, {"convexity", verdicts}};
  io::write_atomic(ctx.main_path("_contours.json"), io::dump(doc));
  io::write_atomic(ctx.path_for("_contours.csv"), io::csv({"level", "curve", "closed", "index", "x", "y"}, rows));
  io::write_atomic(ctx.path_for("_levels.svg"), io::level_svg(all, window, "Level sets of " + cfg.field));
  *ctx.out << "levelsets: " << all.size() << " curves over " << cfg.levels.size() << " levels\n";
  return 0;
}

int cmd_audit(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<std::string> checks = cfg.checks;
  if (checks.empty()) checks = {"harmonicity", "boundary", "convexity", "strictness", "slice_maxima"};
  io::Rng rng(cfg.seed);
  json results = json::array();
  bool ok = true;
  json timings = json::object();
  for (const auto& name : checks) {
    ctx.log("check " + name);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_check(name, cfg, rng);
    timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && r.ok();
    results.push_back({{"name", r.name}, {"passed", r.passed}, {"expected", r.expected}, {"outcome", r.outcome()},
                       {"details", r.details}});
    *ctx.out << r.name << ": " << r.outcome() << "\n";
  }
  json report = {{"tool", "martin"}, {"version", io::kVersion}, {"config", cfg.to_json()},
                 {"checks", results}, {"all_ok", ok}};
  if (ctx.timings) report["timings_seconds"] = timings;
  io::write_atomic(ctx.main_path("_report.json"), io::dump(report));
  return ok ? 0 : 1;
}

int cmd_green(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.green) throw io::ConfigError("green: missing green configuration");
  const auto domain = config_domain(cfg);
  json doc = {{"domain", domain.to_json()}, {"h", cfg.green->h}, {"mode", cfg.green->mode}};
  if (cfg.green->mode == "ring") {
    if (domain.kind() != DomainKind::convex_ring) throw io::ConfigError("green: ring mode needs a convex_ring domain");
    ctx.log("solving convex ring");
    const auto sol = green::convex_ring_solution(domain, cfg.green->h, {.rel_tol = cfg.green->rel_tol});
    doc["ring"] = ring_verdicts(sol, domain, cfg.green->levels);
    std::vector<std::vector<std::string>> rows;
    const auto& g = sol.grid();
    for (long f = 0; f < g.size(); ++f)
      rows.push_back({io::csv_number(g.node(f).x()), io::csv_number(g.node(f).y()), io::csv_number(sol.at(f))});
    io::write_atomic(ctx.path_for("_ring.csv"), io::csv({"x", "y", "u"}, rows));
    io::write_atomic(ctx.main_path("_green.json"), io::dump(doc));
    *ctx.out << "green ring: maximum principle " << (doc["ring"]["maximum_principle"].get<bool>() ? "holds" : "FAILS")
             << ", convex levels " << (doc["ring"]["all_convex"].get<bool>() ? "all" : "not all") << "\n";
    return 0;
  }
  const auto acfg = approx_config(*cfg.green);
  std::optional<green::MartinResult> res;
  try {
    // Invalid pole / probe layouts surface as invalid_argument before any solve.
    for (const double s : acfg.poles) {
      const auto w = green::truncation_window(domain, s, cfg.green->h, acfg);
      if (!acfg.probe.inside(w, 1e-12)) throw io::ConfigError("green: probe window outside the truncation for pole " + std::to_string(s));
      if (!domain.contains(Point(s, 0.0))) throw io::ConfigError("green: pole " + std::to_string(s) + " is not interior");
    }
    ctx.log("solving " + std::to_string(acfg.poles.size()) + " Green functions");
    res = green::martin_ratio(domain, acfg, cfg.green->h);
  } catch (const std::invalid_argument& e) {
    throw io::ConfigError(e.what());
  }
  json iterates = json::array();
  for (const auto& it : res->iterates) {
    iterates.push_back({{"index", it.index}, {"pole", it.pole}, {"normalization", it.normalization},
                        {"iterations", it.ratio->stats().iterations}, {"rel_residual", it.ratio->stats().rel_residual},
                        {"window", io::to_json(it.ratio->grid().window())},
                        {"nx", it.ratio->grid().nx()}, {"ny", it.ratio->grid().ny()}});
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : res->probe_values)
      rows.push_back({io::csv_number(s.point.x()), io::csv_number(s.point.y()), io::csv_number(it.ratio->value(Vec(s.point)))});
    io::write_atomic(ctx.path_for("_iterate_" + std::to_string(it.index) + ".csv"), io::csv({"x", "y", "u"}, rows));
  }
  json values = json::array(), xs = json::array(), ys = json::array();
  for (int i = 0; i < res->probe_nx; ++i) xs.push_back(res->probe_values[static_cast<size_t>(i)].point.x());
  for (int j = 0; j < res->probe_ny; ++j) ys.push_back(res->probe_values[static_cast<size_t>(j * res->probe_nx)].point.y());
  for (const auto& s : res->probe_values) values.push_back(std::isnan(s.value) ? json(nullptr) : json(s.value));
  doc["x0"] = {acfg.x0.x(), acfg.x0.y()};
  doc["iterates"] = iterates;
  doc["cauchy"] = res->cauchy;
  doc["probe"] = {{"layout", "row-major: values[j * nx + i] at (x[i], y[j]); y outer, x inner"},
                  {"window", io::to_json(acfg.probe)}, {"nx", res->probe_nx}, {"ny", res->probe_ny},
                  {"x", xs}, {"y", ys}, {"values", values}};
  const auto exact = closed_form_for(domain.kind());
  const auto cmp = compare_ratio(*res, exact.get(), acfg.x0);
  doc["cauchy_decreasing"] = cmp.cauchy_decreasing;
  doc["closed_form"] = exact ? json{{"field", exact->name()}, {"rel_sup_error", cmp.rel_sup}} : json(nullptr);
  io::write_atomic(ctx.main_path("_green.json"), io::dump(doc));
  *ctx.out << "green: " << res->iterates.size() << " iterates";
  if (exact) *ctx.out << ", relative sup error vs " << exact->name() << " = " << cmp.rel_sup;
  *ctx.out << "\n";
  return 0;
}

int cmd_slice_scan(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (cfg.slice_t.empty()) throw io::ConfigError("slice-scan: no slice positions");
  const auto field = config_field(cfg);
  json per = json::array();
  for (const double t : cfg.slice_t) {
    ctx.log("slice t=" + std::to_string(t));
    json j = io::to_json(slices::slice_scan(*field, t, cfg.slice_samples));
    try {
      const auto sh = slices::slice_superharmonicity(*field, t, cfg.slice_samples);
      j["superharmonicity"] = {{"min_dtt", sh.min_dtt}, {"argmin", io::to_json(sh.argmin)}, {"samples", sh.samples},
                               {"skipped", sh.skipped}};
    } catch (const std::invalid_argument& e) {
      j["superharmonicity"] = {{"error", e.what()}};
    }
    per.push_back(std::move(j));
  }
  io::write_atomic(ctx.main_path("_slices.json"), io::dump({{"field", cfg.field}, {"slices", per}}));
  *ctx.out << "slice-scan: " << cfg.slice_t.size() << " slices\n";
  return 0;
}

int cmd_asymptotics(const Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<std::string> checks = cfg.asymptotic_checks;
  if (checks.empty()) checks = {"f-decay", "hess-residual"};
  const auto& rr = cfg.radii;
  if (rr.size() != 3 || !(rr[0] > 0) || !(rr[1] > rr[0]) || rr[2] < 2 || rr[2] != std::floor(rr[2]))
    throw io::ConfigError("asymptotics: radii must be a:b:n with 0 < a < b, n >= 2");
  const auto radii = slices::geometric_radii(rr[0], rr[1], static_cast<int>(rr[2]));
  io::Rng rng(cfg.seed);
  json doc = {{"radii", radii}};
  for (const auto& check : checks) {
    ctx.log("asymptotics " + check);
    if (check == "f-decay") {
      doc["f-decay"] = {
          {"first_derivative", io::to_json(slices::decay_fit([](double r) { return slices::gap_derivative_magnitude(1, r); }, radii))},
          {"second_derivative", io::to_json(slices::decay_fit([](double r) { return slices::gap_derivative_magnitude(2, r); }, radii))},
          {"expected_slopes", {-3.0, -4.0}}};
    } else if (check == "hess-residual") {
      const auto t = slices::tangent_form_asymptotic(radii);
      doc["hess-residual"] = {{"fit", io::to_json(t.fit)},
                              {"last_nonnegative_radius", std::isnan(t.last_nonnegative_radius) ? json(nullptr) : json(t.last_nonnegative_radius)},
                              {"required_slope_at_most", -1.9}};
    } else if (check == "v-identity") {
      const fields::HalfplaneV v;
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const double x = rng.uniform(0.1, 10.0), y = rng.uniform(-0.99, 0.99) * x;
        const Vec p = Vec2(x, y);
        worst = std::max(worst, std::abs(levelset::tangent_hessian_form(v, p) + 8.0 * v.value(p)));
      }
      doc["v-identity"] = {{"max_abs", worst}, {"tolerance", 1e-9}};
    } else if (check == "threshold") {
      std::vector<double> levels = cfg.threshold_levels;
      if (levels.empty()) levels = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0};
      const auto th = slices::convexity_threshold(*fields::make_field("slit_sector"), levels);
      json entries = json::array();
      for (const auto& e : th.entries) {
        json j = io::to_json(e.report);
        j["level"] = e.c;
        entries.push_back(std::move(j));
      }
      doc["threshold"] = {{"levels", entries},
                          {"c_nonconvex", th.c_nonconvex ? json(*th.c_nonconvex) : json(nullptr)},
                          {"c_convex", th.c_convex ? json(*th.c_convex) : json(nullptr)}};
    } else if (check == "rescale") {
      const auto K = WindowBox::planar(-2.0, 2.0, -2.0, 2.0);
      const auto strip = fields::make_field("strip");
      json strips = json::array();
      for (const double s : {6.0, 10.0}) {
        const auto r = slices::rescale_and_compare(*strip, s, K, fields::CylinderMode::make(1, 1.0, 0.0));
        strips.push_back({{"s", s}, {"M", r.M}, {"v_at_origin", r.v_at_origin}, {"A", r.fitted_A}, {"B", r.fitted_B},
                          {"sup_error", r.sup_error}, {"hausdorff", r.hausdorff}});
      }
      const auto sqrt_domain = NamedDomain::profile(
          geometry::ProfileDomain(geometry::Profile::from_name("sqrt"), geometry::ConvexBody::interval(-1.0, 1.0)));
      json dh = json::array();
      for (const double s : {100.0, 400.0, 1600.0}) dh.push_back({{"s", s}, {"hausdorff", slices::rescaled_hausdorff(sqrt_domain, s, K)}});
      doc["rescale"] = {{"strip", strips}, {"sqrt_profile", dh}};
    } else {
      throw io::ConfigError("asymptotics: unknown check " + check);
    }
  }
  io::write_atomic(ctx.main_path("_asymptotics.json"), io::dump(doc));
  *ctx.out << "asymptotics: " << checks.size() << " checks written\n";
  return 0;
}

void prepare_output(Context& ctx, const std::string& out) {
  fs::path p = out.empty() ? fs::path(".") : fs::path(out);
  if (p.extension() == ".json") {
    ctx.main_file = p;
    p = p.has_parent_path() ? p.parent_path() : fs::path(".");
  }
  ctx.out_dir = p;
  if (!fs::exists(p)) {
    fs::create_directories(p);
    *ctx.err << "warning: output directory " << p.string() << " did not exist and was created\n";
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Martin functions: level sets, Green ratios, slice maxima, asymptotics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("martin ") + io::kVersion);

  std::string config_path, out_path, field, t_list, domain, x0, poles, probe, checks, radii;
  std::optional<std::uint64_t> seed;
  double h = 0.0;
  bool verbose = false, timings = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--out", out_path, "output directory, or a .json file for the main output");
    sub->add_option("--seed", seed, "seed for sample placement");
    sub->add_flag("--verbose", verbose, "progress on stderr");
    sub->add_flag("--timings", timings, "include wall-clock timings in the report");
  };
  auto* levelsets = app.add_subcommand("levelsets", "contours and SVG overlay for the configured levels");
  auto* audit = app.add_subcommand("audit", "run the configured check suite");
  auto* green_cmd = app.add_subcommand("green", "Green-ratio Martin approximation or convex-ring solve");
  auto* slice_cmd = app.add_subcommand("slice-scan", "slice maxima, ray monotonicity, superharmonicity");
  auto* asym = app.add_subcommand("asymptotics", "decay fits and convexity thresholds");
  for (auto* sub : {levelsets, audit, green_cmd, slice_cmd, asym}) add_common(sub);
  green_cmd->set_help_flag("--help", "print help");  // frees -h / --h for the grid spacing
  green_cmd->add_option("--domain", domain, "domain kind, e.g. strip");
  green_cmd->add_option("--x0", x0, "reference point x,y");
  green_cmd->add_option("--poles", poles, "axial pole positions, comma separated");
  green_cmd->add_option("--h", h, "grid spacing");
  green_cmd->add_option("--probe", probe, "probe window x0,x1[,y0,y1]");
  slice_cmd->add_option("--field", field, "registry field");
  slice_cmd->add_option("--t", t_list, "slice positions, comma separated");
  asym->add_option("--check", checks, "f-decay,hess-residual,v-identity,threshold,rescale");
  asym->add_option("--radii", radii, "a:b:n geometric radii");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << "martin " << io::kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  Context ctx;
  ctx.verbose = verbose;
  ctx.timings = timings;
  ctx.out = &out;
  ctx.err = &err;
  try {
    if (!config_path.empty()) ctx.cfg = io::load_config(config_path);
    auto& cfg = ctx.cfg;
    if (seed) cfg.seed = *seed;
    if (!field.empty()) {
      try {
        fields::make_field(field);
      } catch (const std::invalid_argument& e) {
        throw io::ConfigError(e.what());
      }
      cfg.field = field;
      if (config_path.empty()) cfg.name = field;
    }
    if (!t_list.empty()) cfg.slice_t = parse_list(t_list, "--t");
    if (!checks.empty()) {
      cfg.asymptotic_checks.clear();
      std::stringstream ss(checks);
      std::string item;
      while (std::getline(ss, item, ',')) cfg.asymptotic_checks.push_back(item);
    }
    if (!radii.empty()) {
      std::string spec = radii;
      std::replace(spec.begin(), spec.end(), ':', ',');
      cfg.radii = parse_list(spec, "--radii");
      if (cfg.radii.size() != 3) throw io::ConfigError("--radii must be a:b:n");
    }
    if (green_cmd->parsed() && (!domain.empty() || !poles.empty())) {
      io::GreenConfig g = cfg.green.value_or(io::GreenConfig{});
      if (!domain.empty()) {
        cfg.domain = json{{"kind", domain}};
        NamedDomain::from_json(*cfg.domain);
        if (config_path.empty()) cfg.name = domain;
      }
      if (!x0.empty()) {
        const auto v = parse_list(x0, "--x0");
        if (v.size() != 2) throw io::ConfigError("--x0 must be x,y");
        g.x0 = Vec2(v[0], v[1]);
      }
      if (!poles.empty()) g.poles = parse_list(poles, "--poles");
      for (size_t i = 0; i < g.poles.size(); ++i)
        if (!(g.poles[i] > 0.0) || (i > 0 && !(g.poles[i] > g.poles[i - 1])))
          throw io::ConfigError("--poles must be positive and increasing");
      if (h > 0.0) g.h = h;
      if (!(g.h > 0.0)) throw io::ConfigError("green: --h must be positive");
      if (!probe.empty()) {
        const auto v = parse_list(probe, "--probe");
        if (v.size() == 2) g.probe = WindowBox::planar(v[0], v[1], -1.0, 1.0);
        else if (v.size() == 4) g.probe = WindowBox::planar(v[0], v[1], v[2], v[3]);
        else throw io::ConfigError("--probe must be x0,x1 or x0,x1,y0,y1");
      }
      cfg.green = g;
    }
    // Round-trip through JSON so flag-built configs get the same validation as files.
    cfg = io::ExperimentConfig::from_json(cfg.to_json());

    prepare_output(ctx, out_path);
    if (levelsets->parsed()) return cmd_levelsets(ctx);
    if (audit->parsed()) return cmd_audit(ctx);
    if (green_cmd->parsed()) return cmd_green(ctx);
    if (slice_cmd->parsed()) return cmd_slice_scan(ctx);
    if (asym->parsed()) return cmd_asymptotics(ctx);
  } catch (const io::ConfigError& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n  residual " << e.residual() << " after " << e.iterations()
        << " iterations\n";
    try {
      io::write_atomic(ctx.path_for("_solver_failure.json"),
                       io::dump({{"error", e.what()}, {"residual", e.residual()}, {"iterations", e.iterations()}}));
    } catch (const std::exception&) {
    }
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace martin::cli
