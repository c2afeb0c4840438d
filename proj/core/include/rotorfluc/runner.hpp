#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rotorfluc/classical.hpp"
#include "rotorfluc/config.hpp"

namespace rotorfluc {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
  std::string version;
  ConfigMap config_echo;
  std::string mode;

  bool quantum_run = false;
  int J_max = 0;
  // (J0, |M0|, converged J_max) per distinct level; +-M share one entry
  std::vector<std::array<int, 3>> member_jmax;
  double achieved_thermal_weight = 0.0;
  std::size_t n_members = 0;
  double norm_drift = 0.0;
  double top_population = 0.0;
  std::size_t steps = 0;
  double dt_min = 0.0;  // atomic units
  double dt_max = 0.0;

  bool classical_run = false;
  std::uint64_t n_traj = 0;
  std::uint64_t seed = 0;
  ConservationStats conservation;

  std::vector<std::pair<std::string, std::string>> checksums;  // file -> hex
  std::vector<std::pair<std::string, double>> timings;         // stage -> s
  double wall_seconds = 0.0;
};

// FNV-1a 64-bit checksum of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

// Executes the configured pipelines and writes every output file plus
// manifest.json into config.out_dir.  Warnings (classical keys with
// mode = quantum) go to stderr.
RunManifest run(const RunConfig& config, bool classical_keys_present = false);

// Bisects delta_alpha in [0.1, 100] A^3 until the adiabatic quantum
// peak of mean_cos2 hits target_peak within 1e-3 (at most 40
// iterations).  Only the quantum pipeline runs; the classical settings
// in config are ignored.
double calibrate_delta_alpha(const RunConfig& config, double target_peak);

}  // namespace rotorfluc
