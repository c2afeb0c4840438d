#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "rotorfluc/config.hpp"
#include "rotorfluc/constants.hpp"
#include "rotorfluc/errors.hpp"
#include "rotorfluc/runner.hpp"

using namespace rotorfluc;
namespace fs = std::filesystem;

namespace {

ConfigMap minimal_map() {
  return {{"molecule.delta_alpha_A3", "2.0"},
          {"molecule.temperature_K", "0.4"},
          {"pulse.Imax_Wcm2", "1.0e12"},
          {"pulse.fwhm_ps", "0.5"}};
}

RunConfig mini_run_config(const std::string& out_dir) {
  RunConfig c = RunConfig::from_map(minimal_map());
  c.mode = RunMode::quantum;
  c.grid_auto = false;
  c.grid_start_ps = -2.0;
  c.grid_end_ps = 8.0;
  c.grid_samples = 64;
  c.thermal_cutoff = 0.99;
  c.theta_bins = 32;
  c.out_dir = out_dir;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE_BEGIN("config_runner");

TEST_CASE("config text parsing") {
  const ConfigMap m = parse_config_text(
      "# comment\n"
      "\n"
      "  mode = both \n"
      "pulse.fwhm_ps=0.5\n");
  CHECK(m.size() == 2);
  CHECK(m.at("mode") == "both");
  CHECK(m.at("pulse.fwhm_ps") == "0.5");

  CHECK_THROWS_AS(parse_config_text("mode both\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("= 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("defaults and validation") {
  const RunConfig c = RunConfig::from_map(minimal_map());
  CHECK(c.B_cm1 == 0.07941759);
  CHECK(c.mode == RunMode::both);
  CHECK(c.grid_samples == 2048);
  CHECK(c.grid_auto);
  CHECK(c.n_traj == 100000);
  CHECK(c.seed == 12345);
  CHECK(c.window_factor == 2.5);
  CHECK(c.thermal_cutoff == 0.999);
  CHECK(c.jmax_tol == 1e-4);
  CHECK(c.theta_bins == 256);
  CHECK(c.analysis_revival);
  CHECK(c.out_dir == "out");

  auto bad = [&](const std::string& key, const std::string& val) {
    ConfigMap m = minimal_map();
    m[key] = val;
    CHECK_THROWS_AS(RunConfig::from_map(m), ConfigError);
  };
  bad("nonsense.key", "1");
  bad("mode", "quantun");
  bad("grid.samples", "1");
  bad("grid.samples", "2.5");
  bad("classical.n_traj", "0");
  bad("classical.n_traj", "-3");
  bad("quantum.thermal_cutoff", "0");
  bad("analysis.theta_bins", "0");
  bad("analysis.coherence", "maybe");
  bad("pulse.Imax_Wcm2", "1e");
  bad("pulse.fwhm_ps", "inf");

  // grid start/end must come as a pair; span order is a make_grid error
  ConfigMap m = minimal_map();
  m["grid.start_ps"] = "-1";
  CHECK_THROWS_AS(RunConfig::from_map(m), ConfigError);
  m["grid.end_ps"] = "-2";
  CHECK_THROWS_AS(RunConfig::from_map(m).make_grid(), ConfigError);
  m["grid.end_ps"] = "4";
  CHECK(RunConfig::from_map(m).grid_auto == false);

  ConfigMap missing = minimal_map();
  missing.erase("pulse.fwhm_ps");
  CHECK_THROWS_AS(RunConfig::from_map(missing), ConfigError);
}

TEST_CASE("config round trip") {
  ConfigMap m = minimal_map();
  m["mode"] = "classical";
  m["grid.start_ps"] = "-3.5";
  m["grid.end_ps"] = "11.25";
  m["grid.samples"] = "96";
  m["classical.n_traj"] = "777";
  m["classical.seed"] = "9001";
  m["classical.step_ps"] = "0.001";
  m["analysis.distribution"] = "false";
  m["analysis.revival"] = "false";
  m["quantum.step_scale"] = "0.5";
  m["run.out_dir"] = "elsewhere";
  const RunConfig c = RunConfig::from_map(m);
  CHECK(c == RunConfig::from_map(c.to_map()));
  CHECK_FALSE(c == RunConfig::from_map(minimal_map()));

  const ConfigMap reparsed = parse_config_text(serialize_config(c.to_map()));
  CHECK(reparsed == c.to_map());
  CHECK(to_string(c.mode) == "classical");
  CHECK(to_string(RunMode::both) == "both");
}

TEST_CASE("auto grid spans follow the pulse regime") {
  RunConfig c = RunConfig::from_map(minimal_map());  // fwhm 0.5 ps: impulsive
  c.grid_samples = 8;
  const MoleculeSpec mol = c.molecule();
  const auto g = c.make_grid();
  REQUIRE(g.size() == 8);
  CHECK(g.front() == doctest::Approx(-1.25 * units::au_per_ps).epsilon(1e-12));
  CHECK(g.back() == doctest::Approx(1.15 * mol.revival_time()).epsilon(1e-12));
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    CHECK(g[i + 1] - g[i] == doctest::Approx(g[1] - g[0]).epsilon(1e-9));

  c.fwhm_ps = 1000.0;  // slow pulse: grid tracks the envelope
  const auto ga = c.make_grid();
  CHECK(ga.front() == doctest::Approx(-1500.0 * units::au_per_ps).epsilon(1e-12));
  CHECK(ga.back() == doctest::Approx(1500.0 * units::au_per_ps).epsilon(1e-12));

  c.grid_auto = false;
  c.grid_start_ps = -3.0;
  c.grid_end_ps = 7.0;
  c.grid_samples = 11;
  const auto ge = c.make_grid();
  CHECK(ge.front() == -3.0 * units::au_per_ps);
  CHECK(ge.back() == doctest::Approx(7.0 * units::au_per_ps).epsilon(1e-14));
  CHECK(ge[1] - ge[0] == doctest::Approx(units::au_per_ps).epsilon(1e-12));
}

TEST_CASE("load_config flags classical keys") {
  const fs::path p = fs::temp_directory_path() / "rfl_cfg_test.cfg";
  {
    std::ofstream out(p);
    out << "molecule.delta_alpha_A3 = 2\nmolecule.temperature_K = 0.4\n"
           "pulse.Imax_Wcm2 = 1e12\npulse.fwhm_ps = 0.5\n"
           "mode = quantum\nclassical.n_traj = 50\n";
  }
  const ParsedConfig pc = load_config(p.string());
  CHECK(pc.classical_keys_present);
  CHECK(pc.config.mode == RunMode::quantum);
  CHECK(pc.config.n_traj == 50);
  {
    std::ofstream out(p);
    out << "molecule.delta_alpha_A3 = 2\nmolecule.temperature_K = 0.4\n"
           "pulse.Imax_Wcm2 = 1e12\npulse.fwhm_ps = 0.5\n";
  }
  CHECK_FALSE(load_config(p.string()).classical_keys_present);
  std::remove(p.string().c_str());
  CHECK_THROWS_AS(load_config((fs::temp_directory_path() / "no_such.cfg").string()),
                  ConfigError);
}

TEST_CASE("fnv1a reference values") {
  // offset basis and the standard test vector pair
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("quantum run writes coherent outputs") {
  const fs::path dir = fresh_dir("rfl_run_q");
  const RunConfig c = mini_run_config(dir.string());
  const RunManifest m = run(c);

  CHECK(m.version == kVersion);
  CHECK(m.mode == "quantum");
  CHECK(m.quantum_run);
  CHECK_FALSE(m.classical_run);
  CHECK(m.n_members > 0);
  // one convergence entry per distinct (J0, |M0|) level
  CHECK(m.member_jmax.size() >= (m.n_members + 1) / 2);
  CHECK(m.member_jmax.size() <= m.n_members);
  for (const auto& [J0, M0, jm] : m.member_jmax) {
    CHECK(J0 >= M0);
    CHECK(M0 >= 0);
    CHECK(jm <= m.J_max);
  }
  CHECK(m.achieved_thermal_weight >= 0.99);
  CHECK(m.norm_drift < 1e-8);
  CHECK(m.steps > 0);

  for (const char* name : {"quantum_series.csv", "coherence.csv",
                           "quantum_distribution.csv", "analysis.json",
                           "manifest.json"})
    CHECK(fs::exists(dir / name));
  CHECK_FALSE(fs::exists(dir / "classical_series.csv"));

  // checksums in the manifest match the bytes on disk
  REQUIRE(!m.checksums.empty());
  for (const auto& [file, hex] : m.checksums)
    CHECK(fnv1a_hex(slurp(dir / file)) == hex);

  // the echoed config reproduces the effective RunConfig
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  ConfigMap echo;
  for (const auto& [key, value] : manifest.at("config").items())
    echo[key] = value.get<std::string>();
  CHECK(RunConfig::from_map(echo) == c);

  // short grid: revival analysis reports the missing span instead
  const auto analysis = nlohmann::json::parse(slurp(dir / "analysis.json"));
  REQUIRE(analysis.contains("notes"));
  CHECK(analysis.at("notes").size() >= 1);

  const std::string series = slurp(dir / "quantum_series.csv");
  CHECK(series.rfind("t_ps,mean_cos2,mean_cos4,delta_cos2\n", 0) == 0);
  CHECK(std::count(series.begin(), series.end(), '\n') == 65);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path dir1 = fresh_dir("rfl_rerun_1");
  const fs::path dir2 = fresh_dir("rfl_rerun_2");
  RunConfig c = mini_run_config(dir1.string());
  c.mode = RunMode::both;
  c.n_traj = 2000;
  const RunManifest m1 = run(c);
  c.out_dir = dir2.string();
  const RunManifest m2 = run(c);
  REQUIRE(m1.checksums.size() == m2.checksums.size());
  for (std::size_t i = 0; i < m1.checksums.size(); ++i) {
    CHECK(m1.checksums[i].first == m2.checksums[i].first);
    CHECK(m1.checksums[i].second == m2.checksums[i].second);
  }
  CHECK(m1.classical_run);
  CHECK(fs::exists(dir1 / "classical_series.csv"));
  CHECK(fs::exists(dir1 / "classical_distribution.csv"));
  CHECK(m1.conservation.max_energy_drift == 0.0);
}

TEST_CASE("output path collisions raise IoError") {
  const fs::path blocker = fs::temp_directory_path() / "rfl_blocker";
  fs::remove_all(blocker);
  { std::ofstream out(blocker); out << "x"; }
  RunConfig c = mini_run_config((blocker / "out").string());
  CHECK_THROWS_AS(run(c), IoError);
  fs::remove_all(blocker);
}

TEST_CASE("calibration rejects bad targets and empty brackets") {
  RunConfig c = RunConfig::from_map(minimal_map());
  c.mode = RunMode::quantum;
  c.grid_auto = false;
  c.grid_start_ps = -3.0;
  c.grid_end_ps = 3.0;
  c.grid_samples = 16;
  c.thermal_cutoff = 0.99;
  CHECK_THROWS_AS(calibrate_delta_alpha(c, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(calibrate_delta_alpha(c, 1.0), std::invalid_argument);
  c.Imax_Wcm2 = 1.0e9;  // far too weak: peak stays near 1/3 at any alpha
  CHECK_THROWS_AS(calibrate_delta_alpha(c, 0.9), NoConvergence);
}

TEST_SUITE_END();
