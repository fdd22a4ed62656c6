#pragma once

#include "martin/convexity.hpp"
#include "martin/geometry.hpp"
#include "martin/levelset.hpp"
#include "martin/slice_asymptotics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace martin::io {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// xorshift64* (Vigna): state ^= state >> 12, << 25, >> 27; output state * 0x2545F4914F6CDD1D.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}
  std::uint64_t next();
  /// Uniform on [0, 1) from the top 53 bits.
  double uniform();
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::uint64_t state_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// UTF-8 JSON with sorted keys, two-space indent, trailing newline.
std::string dump(const json& j);

/// RFC 4180: CRLF line ends, fields quoted when they contain , " CR or LF.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);
std::string csv_number(double v);

json to_json(const Vec& v);
json to_json(const geometry::WindowBox& w);
geometry::WindowBox window_from_json(const json& j);
json to_json(const levelset::ConvexityReport& r);
json to_json(const levelset::LevelCurve& c);
json to_json(const slices::SliceReport& r);
json to_json(const slices::DecayFit& f);

/// Overlay of level curves on their window, one colour per level. Level values
/// go into <metadata>; the version string sits in a comment.
std::string level_svg(const std::vector<levelset::LevelCurve>& curves, const geometry::WindowBox& window,
                      const std::string& title);

struct GreenConfig {
  std::string mode = "ratio";  // ratio | ring
  Vec2 x0{0.5, 0.0};
  std::vector<double> poles;
  double h = 0.0;
  std::optional<geometry::WindowBox> probe;
  double truncation_factor = 2.0;
  double lateral_half_width = 0.0;
  double rel_tol = 1e-10;
  std::vector<double> levels;  // ring mode
};

/// One experiment, parsed from a single JSON file.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string field;              // registry name
  std::optional<json> domain;     // explicit domain; defaults to the field's
  std::vector<double> levels;
  std::optional<geometry::WindowBox> window;
  double h = 0.0;                 // 0: window width / 400
  std::vector<double> slice_t;
  int slice_samples = 401;
  std::vector<std::string> checks;
  std::map<std::string, bool> expected;  // false marks a negative control
  std::optional<GreenConfig> green;
  std::vector<std::string> asymptotic_checks;
  std::vector<double> radii{5.0, 80.0, 12.0};  // a, b, n
  std::vector<double> threshold_levels;
  std::uint64_t seed = 1;

  /// Throws ConfigError on malformed input or unknown registry names.
  static ExperimentConfig from_json(const json& j);
  json to_json() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace martin::io
