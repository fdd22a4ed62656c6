#include "martin/io.hpp"

#include "martin/fields.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace martin::io {

std::uint64_t Rng::next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (const char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += field(cells[i]);
    }
    out += "\r\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json to_json(const geometry::WindowBox& w) {
  if (w.dim() != 2) return {{"lower", to_json(w.lower)}, {"upper", to_json(w.upper)}};
  return json::array({w.lower[0], w.upper[0], w.lower[1], w.upper[1]});
}

geometry::WindowBox window_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ConfigError("window must be [x0, x1, y0, y1]");
  const auto v = j.get<std::vector<double>>();
  if (!(v[0] < v[1] && v[2] < v[3])) throw ConfigError("window bounds must be increasing");
  return geometry::WindowBox::planar(v[0], v[1], v[2], v[3]);
}

json to_json(const levelset::ConvexityReport& r) {
  json j = {{"verdict", levelset::to_string(r.verdict)},
            {"hull_deviation", r.hull_deviation},
            {"threshold", r.threshold},
            {"tangent_form_max", std::isnan(r.tangent_form_max) ? json(nullptr) : json(r.tangent_form_max)},
            {"note", r.note}};
  if (r.witness) {
    j["witness"] = {{"p", to_json(Vec(r.witness->p))}, {"q", to_json(Vec(r.witness->q))},
                    {"mid", to_json(Vec(r.witness->mid))}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json to_json(const levelset::LevelCurve& c) {
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back({p.x(), p.y()});
  return {{"level", c.level}, {"closed", c.closed}, {"points", std::move(pts)}};
}

json to_json(const slices::SliceReport& r) {
  json argmax = json::array();
  for (const auto& p : r.argmax) argmax.push_back(to_json(p));
  json rays = json::array();
  for (const auto& ray : r.rays) {
    rays.push_back({{"direction", to_json(ray.direction)},
                    {"extent", ray.extent},
                    {"steps", ray.steps},
                    {"strictly_decreasing", ray.strictly_decreasing},
                    {"first_violation", ray.first_violation ? to_json(*ray.first_violation) : json(nullptr)}});
  }
  return {{"t", r.t},
          {"M", r.M},
          {"argmax", std::move(argmax)},
          {"center_value", std::isnan(r.center_value) ? json(nullptr) : json(r.center_value)},
          {"samples", r.samples},
          {"rays", std::move(rays)}};
}

json to_json(const slices::DecayFit& f) {
  return {{"radii", f.radii}, {"values", f.values}, {"slope", f.slope}, {"intercept", f.intercept},
          {"residual", f.residual}};
}

std::string level_svg(const std::vector<levelset::LevelCurve>& curves, const geometry::WindowBox& window,
                      const std::string& title) {
  static const std::array<const char*, 8> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                     "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  const double x0 = window.lower[0], x1 = window.upper[0], y0 = window.lower[1], y1 = window.upper[1];
  const double width = 640.0;
  const double height = std::clamp(width * (y1 - y0) / (x1 - x0), 160.0, 1280.0);
  const double margin = 40.0;
  auto sx = [&](double x) { return margin + (x - x0) / (x1 - x0) * width; };
  auto sy = [&](double y) { return margin + (y1 - y) / (y1 - y0) * height; };

  std::set<double> levels;
  for (const auto& c : curves) levels.insert(c.level);
  std::vector<double> level_list(levels.begin(), levels.end());

  std::ostringstream os;
  os.precision(6);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<!-- martin " << kVersion << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 2 * margin << "\" height=\""
     << height + 2 * margin << "\">\n";
  os << "<metadata>{\"title\": \"" << title << "\", \"levels\": [";
  for (size_t i = 0; i < level_list.size(); ++i) os << (i ? ", " : "") << level_list[i];
  os << "], \"window\": [" << x0 << ", " << x1 << ", " << y0 << ", " << y1 << "]}</metadata>\n";
  os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  if (x0 < 0 && 0 < x1)
    os << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(y0) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(y1)
       << "\" stroke=\"#bbb\"/>\n";
  if (y0 < 0 && 0 < y1)
    os << "<line x1=\"" << sx(x0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(x1) << "\" y2=\"" << sy(0)
       << "\" stroke=\"#bbb\"/>\n";
  os << "<text x=\"" << margin << "\" y=\"" << margin - 12 << "\" font-size=\"14\">" << title << "</text>\n";
  for (const auto& c : curves) {
    const size_t k = static_cast<size_t>(std::lower_bound(level_list.begin(), level_list.end(), c.level) - level_list.begin());
    os << "<polyline fill=\"none\" stroke=\"" << palette[k % palette.size()] << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : c.points) os << sx(p.x()) << ',' << sy(p.y()) << ' ';
    if (c.closed && !c.points.empty()) os << sx(c.points.front().x()) << ',' << sy(c.points.front().y());
    os << "\"/>\n";
  }
  for (size_t k = 0; k < level_list.size(); ++k) {
    os << "<text x=\"" << margin + width - 90 << "\" y=\"" << margin + 18 + 16 * k << "\" font-size=\"12\" fill=\""
       << palette[k % palette.size()] << "\">c = " << level_list[k] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Config

namespace {

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

std::vector<double> increasing_positive(const json& j, const char* what) {
  auto v = j.get<std::vector<double>>();
  for (size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw ConfigError(std::string(what) + ": non-finite value");
    if (i > 0 && !(v[i] > v[i - 1])) throw ConfigError(std::string(what) + " must be strictly increasing");
  }
  return v;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  static const std::set<std::string> known = {"name",   "field",  "domain", "levels", "window",
                                              "h",      "slices", "checks", "expected",
                                              "green",  "asymptotics", "seed"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key: " + key);
  ExperimentConfig c;
  try {
    c.name = get<std::string>(j, "name", c.name);
    c.field = get<std::string>(j, "field", "");
    if (!c.field.empty()) fields::make_field(c.field);
    if (j.contains("domain")) {
      c.domain = j.at("domain");
      geometry::NamedDomain::from_json(*c.domain);
    }
    if (j.contains("levels")) {
      c.levels = increasing_positive(j.at("levels"), "levels");
      for (const double v : c.levels)
        if (!(v > 0.0)) throw ConfigError("levels must be positive");
    }
    if (j.contains("window")) c.window = window_from_json(j.at("window"));
    c.h = get<double>(j, "h", 0.0);
    if (c.h < 0.0) throw ConfigError("h must be positive");
    if (j.contains("slices")) {
      const auto& s = j.at("slices");
      c.slice_t = increasing_positive(s.at("t"), "slices.t");
      c.slice_samples = get<int>(s, "samples", c.slice_samples);
      if (c.slice_samples < 3) throw ConfigError("slices.samples must be >= 3");
    }
    c.checks = get<std::vector<std::string>>(j, "checks", {});
    c.expected = get<std::map<std::string, bool>>(j, "expected", {});
    if (j.contains("green")) {
      const auto& g = j.at("green");
      GreenConfig gc;
      gc.mode = get<std::string>(g, "mode", gc.mode);
      if (gc.mode != "ratio" && gc.mode != "ring") throw ConfigError("green.mode must be ratio or ring");
      if (g.contains("x0")) {
        const auto x0 = g.at("x0").get<std::vector<double>>();
        if (x0.size() != 2) throw ConfigError("green.x0 must have two coordinates");
        gc.x0 = Vec2(x0[0], x0[1]);
      }
      if (g.contains("poles")) gc.poles = increasing_positive(g.at("poles"), "green.poles");
      gc.h = get<double>(g, "h", 0.0);
      if (!(gc.h > 0.0)) throw ConfigError("green.h must be positive");
      if (g.contains("probe")) gc.probe = window_from_json(g.at("probe"));
      gc.truncation_factor = get<double>(g, "truncation_factor", gc.truncation_factor);
      gc.lateral_half_width = get<double>(g, "lateral_half_width", gc.lateral_half_width);
      gc.rel_tol = get<double>(g, "rel_tol", gc.rel_tol);
      if (g.contains("levels")) gc.levels = increasing_positive(g.at("levels"), "green.levels");
      if (gc.mode == "ratio" && gc.poles.empty()) throw ConfigError("green.poles must be nonempty");
      c.green = gc;
    }
    if (j.contains("asymptotics")) {
      const auto& a = j.at("asymptotics");
      c.asymptotic_checks = get<std::vector<std::string>>(a, "checks", {});
      c.radii = get<std::vector<double>>(a, "radii", c.radii);
      if (c.radii.size() != 3) throw ConfigError("asymptotics.radii must be [a, b, n]");
      if (a.contains("levels")) c.threshold_levels = increasing_positive(a.at("levels"), "asymptotics.levels");
    }
    c.seed = get<std::uint64_t>(j, "seed", c.seed);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j = {{"name", name}, {"h", h}, {"seed", seed}, {"checks", checks}, {"expected", expected}};
  if (!field.empty()) j["field"] = field;
  if (domain) j["domain"] = *domain;
  if (!levels.empty()) j["levels"] = levels;
  if (window) j["window"] = io::to_json(*window);
  if (!slice_t.empty()) j["slices"] = {{"t", slice_t}, {"samples", slice_samples}};
  if (green) {
    json g = {{"mode", green->mode},         {"x0", {green->x0.x(), green->x0.y()}},
              {"h", green->h},               {"truncation_factor", green->truncation_factor},
              {"lateral_half_width", green->lateral_half_width}, {"rel_tol", green->rel_tol}};
    if (!green->poles.empty()) g["poles"] = green->poles;
    if (green->probe) g["probe"] = io::to_json(*green->probe);
    if (!green->levels.empty()) g["levels"] = green->levels;
    j["green"] = std::move(g);
  }
  if (!asymptotic_checks.empty() || !threshold_levels.empty()) {
    json a = {{"checks", asymptotic_checks}, {"radii", radii}};
    if (!threshold_levels.empty()) a["levels"] = threshold_levels;
    j["asymptotics"] = std::move(a);
  }
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return ExperimentConfig::from_json(j);
}

}  // namespace martin::io
