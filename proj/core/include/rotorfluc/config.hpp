#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rotorfluc/pulse.hpp"

namespace rotorfluc {

// Flat "key = value" text, '#' comments, one pair per line.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);
std::string serialize_config(const ConfigMap& map);

enum class RunMode { quantum, classical, both };

std::string to_string(RunMode mode);

// Effective run configuration: raw I/O-unit values as configured, with
// every default made explicit.  to_map() therefore echoes a map that
// parses back to an equal RunConfig.
struct RunConfig {
  double B_cm1 = 0.07941759;
  double delta_alpha_A3 = 0.0;
  double temperature_K = 0.0;

  double Imax_Wcm2 = 0.0;
  double fwhm_ps = 0.0;
  double center_ps = 0.0;
  double window_factor = 2.5;

  RunMode mode = RunMode::both;

  int grid_samples = 2048;
  bool grid_auto = true;          // derive span from the pulse regime
  double grid_start_ps = 0.0;     // used when grid_auto is false
  double grid_end_ps = 0.0;

  std::uint64_t n_traj = 100000;
  std::uint64_t seed = 12345;
  double classical_step_ps = 0.0; // 0 = automatic substepping

  double thermal_cutoff = 0.999;
  double jmax_tol = 1e-4;
  double step_scale = 1.0;

  int theta_bins = 256;
  bool analysis_distribution = true;
  bool analysis_coherence = true;
  bool analysis_revival = true;

  std::string out_dir = "out";

  MoleculeSpec molecule() const;
  PulseSpec pulse_spec() const;

  // Uniform output grid in atomic units.  Auto span: impulsive pulses
  // (fwhm < tau_rev/4) get [center - window, center + 1.15 tau_rev],
  // adiabatic ones [center - 1.5 fwhm, center + 1.5 fwhm].
  std::vector<double> make_grid() const;

  static RunConfig from_map(const ConfigMap& map);
  ConfigMap to_map() const;

  bool operator==(const RunConfig& other) const;
};

// Parse plus the list of keys that were present; the runner warns when
// classical.* keys accompany mode = quantum.
struct ParsedConfig {
  RunConfig config;
  bool classical_keys_present = false;
};
ParsedConfig load_config(const std::string& path);

}  // namespace rotorfluc
