#include <cstdint>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "rotorfluc/config.hpp"
#include "rotorfluc/errors.hpp"
#include "rotorfluc/oracle.hpp"
#include "rotorfluc/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIo = 4;

rotorfluc::RunMode parse_mode(const std::string& text) {
  if (text == "quantum") return rotorfluc::RunMode::quantum;
  if (text == "classical") return rotorfluc::RunMode::classical;
  if (text == "both") return rotorfluc::RunMode::both;
  throw rotorfluc::ConfigError("invalid mode '" + text +
                               "' (expected quantum, classical, or both)");
}

int cmd_run(const std::string& config_path, const std::string& mode,
            const std::string& out_dir, bool seed_given, std::uint64_t seed) {
  rotorfluc::ParsedConfig parsed = rotorfluc::load_config(config_path);
  rotorfluc::RunConfig config = parsed.config;
  if (!mode.empty()) config.mode = parse_mode(mode);
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (seed_given) config.seed = seed;

  rotorfluc::RunManifest m =
      rotorfluc::run(config, parsed.classical_keys_present);

  std::printf("mode %s, %zu output files in %s\n", m.mode.c_str(),
              m.checksums.size() + 1, config.out_dir.c_str());
  if (m.quantum_run)
    std::printf("quantum: %zu members, J_max %d, %zu steps, norm drift %.3g\n",
                m.n_members, m.J_max, m.steps, m.norm_drift);
  if (m.classical_run)
    std::printf("classical: %llu trajectories, seed %llu, "
                "max energy drift %.3g\n",
                static_cast<unsigned long long>(m.n_traj),
                static_cast<unsigned long long>(m.seed),
                m.conservation.max_energy_drift);
  std::printf("wall %.2f s\n", m.wall_seconds);
  return 0;
}

int cmd_calibrate(const std::string& config_path, double target) {
  rotorfluc::ParsedConfig parsed = rotorfluc::load_config(config_path);
  const double value =
      rotorfluc::calibrate_delta_alpha(parsed.config, target);
  std::printf("%.10g\n", value);
  return 0;
}

int cmd_oracle(const std::string& check) {
  if (check != "matrix-elements")
    throw rotorfluc::ConfigError("unknown oracle check '" + check + "'");
  rotorfluc::oracle::CheckReport report =
      rotorfluc::oracle::check_matrix_elements();
  std::printf("%s: %d elements compared, max |diff| = %.3g: %s\n",
              report.name.c_str(), report.compared, report.max_abs_diff,
              report.passed ? "pass" : "FAIL");
  return report.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotational alignment dynamics of linear molecules in "
               "nonresonant laser pulses"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mode;
  std::string out_dir;
  std::uint64_t seed = 0;

  CLI::App* run_cmd =
      app.add_subcommand("run", "execute the pipelines from a config file");
  run_cmd->add_option("--config", config_path, "config file path")->required();
  run_cmd->add_option("--mode", mode, "quantum, classical, or both");
  run_cmd->add_option("--out", out_dir, "output directory");
  CLI::Option* seed_opt =
      run_cmd->add_option("--seed", seed, "classical sampling seed");

  std::string cal_config;
  double target = 0.8;
  CLI::App* cal_cmd = app.add_subcommand(
      "calibrate", "bisect delta_alpha to hit a target peak <cos^2 theta>");
  cal_cmd->add_option("--config", cal_config, "config file path")->required();
  cal_cmd->add_option("--target", target, "target peak mean_cos2")->required();

  std::string check = "matrix-elements";
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "run an independent numerical cross-check");
  oracle_cmd->add_option("--check", check, "check name (matrix-elements)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run_cmd->parsed())
      return cmd_run(config_path, mode, out_dir, seed_opt->count() > 0, seed);
    if (cal_cmd->parsed()) return cmd_calibrate(cal_config, target);
    return cmd_oracle(check);
  } catch (const rotorfluc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const rotorfluc::NoConvergence& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return kExitConvergence;
  } catch (const rotorfluc::TruncationOverflow& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return kExitConvergence;
  } catch (const rotorfluc::StepFailure& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return kExitConvergence;
  } catch (const rotorfluc::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
