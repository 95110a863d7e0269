#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "insulate/config.hpp"
#include "insulate/io.hpp"
#include "insulate/runner.hpp"

using namespace ins;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("config parsing, overrides and diagnostics") {
  const std::string text =
      "# comment\n"
      "[problem]\n"
      "robin_h = 2.5\n"
      "volume_cost = 0.1   # trailing comment\n"
      "\n"
      "[omega]\n"
      "radius = 0.7\n";
  Config c = Config::parse_string(text, "inline", true);
  CHECK(c.get_double("problem", "robin_h") == 2.5);
  CHECK(c.get_double("omega", "radius") == 0.7);
  CHECK(c.get_int("problem", "dim") == 2);  // default preserved

  c.set("solver.n_s", "96", true);
  CHECK(c.get_int("solver", "n_s") == 96);
  CHECK_THROWS_AS(c.set("solver.bogus", "1", true), ConfigError);
  c.set("solver.bogus", "1", false);  // non-strict accepts
  CHECK(c.get("solver", "bogus") == "1");

  // strict mode pinpoints the offending line
  const std::string bad = "[problem]\nrobin_h = 1\nnonsense = 2\n";
  try {
    Config::parse_string(bad, "bad.cfg", true);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.cfg:3") != std::string::npos);
    CHECK(std::string(e.what()).find("nonsense") != std::string::npos);
  }
  CHECK_NOTHROW(Config::parse_string(bad, "bad.cfg", false));

  CHECK_THROWS_AS(Config::parse_string("[problem\nx=1\n", "p", false), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("key_outside = 1\n", "p", false), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[problem]\nrobin_h\n", "p", false), ConfigError);
  CHECK_THROWS_AS(Config().get("problem", "dim"), ConfigError);

  // round trip: dump and re-read reproduce every value
  Config d = Config::parse_string(c.serialize(), "echo", false);
  CHECK(d.serialize() == c.serialize());
}

TEST_CASE("typed getters reject malformed values") {
  Config c = Config::defaults();
  c.set("problem.robin_h", "abc", true);
  CHECK_THROWS_AS(c.get_double("problem", "robin_h"), ConfigError);
  c.set("problem.dim", "2.5", true);
  CHECK_THROWS_AS(c.get_int("problem", "dim"), ConfigError);
  c.set("problem.allow_degenerate", "maybe", true);
  CHECK_THROWS_AS(c.get_bool("problem", "allow_degenerate"), ConfigError);
  c.set("phase_field.eps_schedule", "4,x,2", true);
  CHECK_THROWS_AS(c.get_list("phase_field", "eps_schedule"), ConfigError);
  c.set("phase_field.eps_schedule", "4, 2.83, 2", true);
  CHECK(c.get_list("phase_field", "eps_schedule").size() == 3);
}

TEST_CASE("shipped defaults file matches the built-in reference") {
  // configs/defaults.cfg documents every knob; it must stay in sync
  Config shipped = Config::parse_file(std::string(PROJECT_SOURCE_DIR) + "/configs/defaults.cfg", true);
  CHECK(shipped.serialize() == Config::defaults().serialize());
}

TEST_CASE("grid round trip is exact") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uv(-1.0, 1.0);
  GridField g(17, 9, -0.3, 0.7, 0.013, 0.041, 0.0);
  for (double& v : g.values) v = uv(rng) * std::pow(10.0, static_cast<int>(rng() % 7) - 3);
  const std::string path = temp_path("roundtrip.grid");
  write_grid(path, g);
  GridField h = read_grid(path);
  CHECK(h.nx == g.nx);
  CHECK(h.ny == g.ny);
  CHECK(h.x0 == g.x0);
  CHECK(h.y0 == g.y0);
  CHECK(h.dx == g.dx);
  CHECK(h.dy == g.dy);
  for (size_t k = 0; k < g.values.size(); ++k) CHECK(h.values[k] == g.values[k]);
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_grid(temp_path("missing.grid")), ConfigError);
  const std::string badpath = temp_path("bad.grid");
  std::ofstream(badpath) << "NOTGRID v9 1 1\n";
  CHECK_THROWS_AS(read_grid(badpath), ConfigError);
  std::remove(badpath.c_str());
}

TEST_CASE("runner: deterministic artifacts and manifest checksums") {
  Config c = Config::defaults();
  c.set("problem.volume_cost", "0.05", true);
  c.set("phase_field.nx", "48", true);
  c.set("phase_field.ny", "48", true);
  c.set("phase_field.max_alternations", "5", true);

  const std::string dir_a = temp_path("ins_run_a"), dir_b = temp_path("ins_run_b");
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  RunOutcome a = run_subcommand("phase-field", c, dir_a, 7);
  RunOutcome b = run_subcommand("phase-field", c, dir_b, 7);
  REQUIRE(a.artifacts == b.artifacts);
  for (const std::string& name : a.artifacts) {
    if (name == "manifest.json") continue;  // carries wall time
    CHECK(file_checksum(dir_a + "/" + name) == file_checksum(dir_b + "/" + name));
  }
  // manifest lists every artifact with its checksum
  std::ifstream in(dir_a + "/manifest.json");
  std::string manifest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (const std::string& name : a.artifacts) {
    if (name == "manifest.json") continue;  // cannot list itself
    CHECK(manifest.find(name) != std::string::npos);
    CHECK(manifest.find(checksum_hex(file_checksum(dir_a + "/" + name))) != std::string::npos);
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("runner: bad subcommand and malformed analyze input") {
  Config c = Config::defaults();
  CHECK_THROWS_AS(run_subcommand("bogus", c, temp_path("ins_run_x"), 0), ConfigError);
  CHECK_THROWS_AS(run_subcommand("analyze", c, temp_path("ins_run_x"), 0), ConfigError);
  std::filesystem::remove_all(temp_path("ins_run_x"));
}
