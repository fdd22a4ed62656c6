#include "martin/cli.hpp"
#include "martin/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace martin;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::vector<const char*> argv = {"martin"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("martin_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const fs::path kConfigs = MARTIN_CONFIG_DIR;

}  // namespace

TEST_SUITE("io") {

TEST_CASE("xorshift64* reference sequence") {
  // independent reimplementation
  std::uint64_t s = 42;
  io::Rng rng(42);
  for (int i = 0; i < 5; ++i) {
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    CHECK(rng.next() == s * 0x2545F4914F6CDD1DULL);
  }
  io::Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(x == b.uniform());
  }
}

TEST_CASE("csv quoting") {
  const auto text = io::csv({"a", "b"}, {{"1", "x,y"}, {"say \"hi\"", "z"}});
  CHECK(text == "a,b\r\n1,\"x,y\"\r\n\"say \"\"hi\"\"\",z\r\n");
  CHECK(io::csv_number(0.5) == "0.5");
}

TEST_CASE("json dump is sorted with a trailing newline") {
  const auto s = io::dump(io::json{{"b", 1}, {"a", 2}});
  CHECK(s.find("\"a\"") < s.find("\"b\""));
  CHECK(s.back() == '\n');
}

TEST_CASE("atomic write leaves no temporary") {
  const auto dir = scratch("atomic");
  io::write_atomic(dir / "f.txt", "hello");
  CHECK(slurp(dir / "f.txt") == "hello");
  CHECK_FALSE(fs::exists(dir / "f.txt.tmp"));
}

TEST_CASE("window json") {
  const auto w = io::window_from_json(io::to_json(geometry::WindowBox::planar(0.0, 2.0, -1.0, 1.0)));
  CHECK(w.upper[0] == 2.0);
  CHECK(w.lower[1] == -1.0);
  CHECK_THROWS(io::window_from_json(io::json::array({1, 2, 3})));
}

TEST_CASE("config parsing") {
  const auto cfg = io::load_config(kConfigs / "strip.json");
  CHECK(cfg.field == "strip");
  CHECK_FALSE(cfg.levels.empty());
  const auto again = io::ExperimentConfig::from_json(cfg.to_json());
  CHECK(again.to_json() == cfg.to_json());
  CHECK_THROWS_AS(io::ExperimentConfig::from_json({{"field", "strip"}, {"levels", {1.0}}, {"bogus", 1}}), io::ConfigError);
  CHECK_THROWS_AS(io::ExperimentConfig::from_json({{"field", "torus"}, {"levels", {1.0}}}), io::ConfigError);
  CHECK_THROWS_AS(io::load_config(kConfigs / "missing.json"), io::ConfigError);
}

TEST_CASE("svg carries level metadata") {
  const fields::StripMartin u;
  const auto window = geometry::WindowBox::planar(0.0, 3.0, -kHalfPi, kHalfPi);
  const auto curves = levelset::extract_level_curve(u, 1.0, window, 0.05);
  const auto svg = io::level_svg(curves, window, "strip");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<metadata>") != std::string::npos);
  CHECK(svg.find(io::kVersion) != std::string::npos);
}

}

TEST_SUITE("cli") {

TEST_CASE("levelsets writes contours, csv and svg") {
  const auto dir = scratch("levelsets");
  const auto r = run({"levelsets", "--config", (kConfigs / "strip.json").string(), "--out", dir.string()});
  CHECK(r.code == 0);
  const auto j = io::json::parse(slurp(dir / "strip_contours.json"));
  CHECK_FALSE(j.at("contours").empty());
  CHECK(fs::exists(dir / "strip_contours.csv"));
  CHECK(fs::exists(dir / "strip_levels.svg"));
}

TEST_CASE("audit with negative controls exits zero") {
  const auto dir = scratch("audit");
  const auto r = run({"audit", "--config", (kConfigs / "exterior.json").string(), "--out", dir.string()});
  CHECK(r.code == 0);
  const auto j = io::json::parse(slurp(dir / "exterior_report.json"));
  bool saw_expected_failure = false;
  for (const auto& c : j.at("checks")) saw_expected_failure |= c.at("outcome") == "FAILED-as-expected";
  CHECK(saw_expected_failure);
}

TEST_CASE("slice-scan and asymptotics") {
  const auto dir = scratch("slices");
  CHECK(run({"slice-scan", "--field", "strip", "--t", "1,2", "--out", dir.string()}).code == 0);
  const auto j = io::json::parse(slurp(dir / "strip_slices.json"));
  CHECK(j.at("slices").size() == 2);
  CHECK(run({"asymptotics", "--check", "f-decay,v-identity", "--radii", "5:80:12", "--out", dir.string()}).code == 0);
}

TEST_CASE("green subcommand from flags") {
  const auto dir = scratch("green");
  const auto r = run({"green", "--domain", "strip", "--x0", "0.5,0", "--poles", "3,4", "--h", "0.0785398163397448",
                      "--probe", "0.5,1.5,-0.8,0.8", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "strip_green.json"));
}

TEST_CASE("invalid input exits with code 2") {
  const auto dir = scratch("bad");
  std::ofstream(dir / "empty_levels.json") << R"({"name": "x", "field": "strip", "levels": []})";
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK(run({"levelsets", "--config", (dir / "empty_levels.json").string(), "--out", dir.string()}).code == 2);
  CHECK(run({"levelsets", "--config", (dir / "broken.json").string(), "--out", dir.string()}).code == 2);
  CHECK(run({"slice-scan", "--field", "torus", "--t", "1", "--out", dir.string()}).code == 2);
  CHECK(run({"green", "--domain", "strip", "--poles", "0.5,1", "--h", "0.05", "--out", dir.string()}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("missing output directory is created with a warning") {
  const auto dir = scratch("mk") / "nested";
  const auto r = run({"slice-scan", "--field", "strip", "--t", "1", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir));
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("check outcomes") {
  cli::CheckResult c{"x", false, false, {}};
  CHECK(c.outcome() == "FAILED-as-expected");
  CHECK(c.ok());
  c.expected = true;
  CHECK(c.outcome() == "FAILED");
  CHECK_FALSE(c.ok());
}

}
