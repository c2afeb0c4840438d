#include "rotorfluc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "rotorfluc/constants.hpp"
#include "rotorfluc/errors.hpp"
#include "rotorfluc/observables.hpp"
#include "rotorfluc/quantum.hpp"

namespace rotorfluc {
namespace {

using ordered_json = nlohmann::ordered_json;
using steady_clock = std::chrono::steady_clock;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double ps(double t_au) { return t_au * units::ps_per_au; }

double seconds_since(steady_clock::time_point t0) {
  return std::chrono::duration<double>(steady_clock::now() - t0).count();
}

std::string series_csv(const ObservableSeries& s) {
  std::string out = "t_ps,mean_cos2,mean_cos4,delta_cos2\n";
  out.reserve(out.size() + s.t.size() * 96);
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    out += fmt(ps(s.t[i]));
    out += ',';
    out += fmt(s.mean_cos2[i]);
    out += ',';
    out += fmt(s.mean_cos4[i]);
    out += ',';
    out += fmt(s.delta_cos2[i]);
    out += '\n';
  }
  return out;
}

// First row: "t_ps" followed by the bin-center angles in rad; one row
// of densities per output time.
std::string distribution_csv(const AngularDistributionSeries& d) {
  std::string out;
  out.reserve((d.t.size() + 1) * (d.theta.size() + 1) * 25);
  out += "t_ps";
  for (double th : d.theta) {
    out += ',';
    out += fmt(th);
  }
  out += '\n';
  for (std::size_t ti = 0; ti < d.t.size(); ++ti) {
    out += fmt(ps(d.t[ti]));
    for (std::size_t bi = 0; bi < d.theta.size(); ++bi) {
      out += ',';
      out += fmt(d.at(ti, bi));
    }
    out += '\n';
  }
  return out;
}

std::string coherence_csv(const CoherenceDecomposition& c) {
  std::string out = "t_ps,c0,c2,c4\n";
  out.reserve(out.size() + c.t.size() * 96);
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    out += fmt(ps(c.t[i]));
    out += ',';
    out += fmt(c.c0[i]);
    out += ',';
    out += fmt(c.c2[i]);
    out += ',';
    out += fmt(c.c4[i]);
    out += '\n';
  }
  return out;
}

ordered_json revival_json(const RevivalReport& r) {
  ordered_json j;
  j["tau_rev_ps"] = ps(r.tau_rev);
  j["baseline_mean"] = r.baseline_mean;
  j["baseline_delta"] = r.baseline_delta;
  j["global_peak_mean"] = r.global_peak_mean;
  j["t_global_peak_ps"] = ps(r.t_global_peak);
  j["delta_at_global_peak"] = r.delta_at_global_peak;
  ordered_json feats = ordered_json::array();
  for (const RevivalFeature& f : r.features) {
    ordered_json e;
    e["quarter"] = f.quarter;
    e["window_ps"] = {ps(f.window_lo), ps(f.window_hi)};
    e["mean_max"] = f.mean_max;
    e["t_mean_max_ps"] = ps(f.t_mean_max);
    e["mean_min"] = f.mean_min;
    e["t_mean_min_ps"] = ps(f.t_mean_min);
    e["delta_max"] = f.delta_max;
    e["t_delta_max_ps"] = ps(f.t_delta_max);
    e["delta_min"] = f.delta_min;
    e["t_delta_min_ps"] = ps(f.t_delta_min);
    e["mean_excursion"] = f.mean_excursion;
    e["delta_excursion"] = f.delta_excursion;
    feats.push_back(std::move(e));
  }
  j["features"] = std::move(feats);
  return j;
}

ordered_json baseline_json(const BaselineComparison& b) {
  ordered_json j;
  j["tau_rev_ps"] = ps(b.tau_rev);
  j["quantum_baseline_mean"] = b.quantum_baseline_mean;
  j["quantum_baseline_delta"] = b.quantum_baseline_delta;
  j["classical_plateau_mean"] = b.classical_plateau_mean;
  j["classical_plateau_delta"] = b.classical_plateau_delta;
  j["early_max_diff_mean"] = b.early_max_diff_mean;
  j["early_max_diff_delta"] = b.early_max_diff_delta;
  j["classical_late_variation"] = b.classical_late_variation;
  j["quantum_late_variation"] = b.quantum_late_variation;
  j["quantum_timeavg_mean"] = b.quantum_timeavg_mean;
  j["quantum_timeavg_delta"] = b.quantum_timeavg_delta;
  j["classical_flat_after_quarter"] = b.classical_flat_after_quarter;
  j["quantum_structured_after_quarter"] = b.quantum_structured_after_quarter;
  j["timeavg_mean_matches_baseline"] = b.timeavg_mean_matches_baseline;
  j["timeavg_delta_below_baseline"] = b.timeavg_delta_below_baseline;
  return j;
}

ordered_json manifest_json(const RunManifest& m) {
  ordered_json j;
  j["version"] = m.version;
  j["mode"] = m.mode;
  ordered_json cfg = ordered_json::object();
  for (const auto& [key, value] : m.config_echo) cfg[key] = value;
  j["config"] = std::move(cfg);
  if (m.quantum_run) {
    ordered_json q;
    q["J_max"] = m.J_max;
    q["achieved_thermal_weight"] = m.achieved_thermal_weight;
    q["n_members"] = m.n_members;
    ordered_json levels = ordered_json::array();
    for (const auto& a : m.member_jmax) levels.push_back({a[0], a[1], a[2]});
    q["converged_jmax_per_level"] = std::move(levels);  // [J0, |M0|, J_max]
    q["norm_drift"] = m.norm_drift;
    q["top_population"] = m.top_population;
    q["steps"] = m.steps;
    q["dt_min_au"] = m.dt_min;
    q["dt_max_au"] = m.dt_max;
    j["quantum"] = std::move(q);
  } else {
    j["quantum"] = nullptr;
  }
  if (m.classical_run) {
    ordered_json c;
    c["n_traj"] = m.n_traj;
    c["seed"] = m.seed;
    ordered_json cons;
    cons["max_unit_dev"] = m.conservation.max_unit_dev;
    cons["max_orth_dev"] = m.conservation.max_orth_dev;
    cons["max_Lz_drift"] = m.conservation.max_Lz_drift;
    cons["max_energy_drift"] = m.conservation.max_energy_drift;
    c["conservation"] = std::move(cons);
    j["classical"] = std::move(c);
  } else {
    j["classical"] = nullptr;
  }
  ordered_json sums = ordered_json::object();
  for (const auto& [file, hex] : m.checksums) sums[file] = hex;
  j["checksums"] = std::move(sums);
  ordered_json times = ordered_json::object();
  for (const auto& [stage, secs] : m.timings) times[stage] = secs;
  j["timings_s"] = std::move(times);
  j["wall_seconds"] = m.wall_seconds;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest run(const RunConfig& config, bool classical_keys_present) {
  const auto wall0 = steady_clock::now();
  const MoleculeSpec mol = config.molecule();
  const PulseSpec pulse = config.pulse_spec();
  const std::vector<double> grid = config.make_grid();

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.config_echo = config.to_map();
  manifest.mode = to_string(config.mode);

  const bool want_quantum = config.mode != RunMode::classical;
  const bool want_classical = config.mode != RunMode::quantum;
  if (!want_classical && classical_keys_present)
    std::fprintf(stderr,
                 "warning: classical.* settings ignored (mode = quantum)\n");

  const std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + dir.string() + ": " +
                  ec.message());

  std::vector<std::pair<std::string, std::string>> files;  // name -> content
  ordered_json analysis = ordered_json::object();
  std::vector<std::string> notes;
  ObservableSeries qseries;
  ObservableSeries cseries;

  if (want_quantum) {
    PropagationOptions opts;
    opts.step_scale = config.step_scale;

    auto t0 = steady_clock::now();
    ThermalEnsemble ensemble = thermal_members(mol, config.thermal_cutoff);
    manifest.achieved_thermal_weight = ensemble.achieved_weight;
    manifest.n_members = ensemble.members.size();

    // One basis search per distinct (J0, |M0|); everyone then
    // propagates at the largest converged rung.
    std::map<std::pair<int, int>, int> level_jmax;
    for (const EnsembleMember& m : ensemble.members)
      level_jmax.emplace(std::pair{m.initial.J, std::abs(m.initial.M)}, 0);
    int global_jmax = 0;
    for (auto& [level, jm] : level_jmax) {
      ConvergenceResult conv =
          converge_jmax({level.first, level.second}, mol, pulse, grid,
                        config.jmax_tol, opts);
      jm = conv.J_max;
      global_jmax = std::max(global_jmax, conv.J_max);
      manifest.member_jmax.push_back({level.first, level.second, conv.J_max});
    }
    manifest.J_max = global_jmax;
    manifest.timings.emplace_back("quantum_converge", seconds_since(t0));

    t0 = steady_clock::now();
    PropagationStats stats =
        propagate_ensemble(ensemble.members, mol, pulse, grid, global_jmax,
                           opts);
    manifest.norm_drift = stats.norm_drift;
    manifest.top_population = stats.top_population;
    manifest.steps = stats.steps;
    manifest.dt_min = stats.dt_min;
    manifest.dt_max = stats.dt_max;
    manifest.timings.emplace_back("quantum_propagate", seconds_since(t0));

    t0 = steady_clock::now();
    DensityBlockSeries density =
        assemble_density(ensemble.members, grid, global_jmax);
    qseries = quantum_observables(density);
    files.emplace_back("quantum_series.csv", series_csv(qseries));
    if (config.analysis_coherence)
      files.emplace_back("coherence.csv",
                         coherence_csv(coherence_decomposition(density)));
    if (config.analysis_distribution)
      files.emplace_back("quantum_distribution.csv",
                         distribution_csv(quantum_angular_distribution(
                             ensemble.members, grid, config.theta_bins)));
    manifest.timings.emplace_back("quantum_observables", seconds_since(t0));

    if (config.analysis_revival) {
      try {
        analysis["revival"] = revival_json(
            revival_analysis(qseries, mol, pulse.center));
      } catch (const InsufficientSpan& e) {
        notes.push_back(std::string("revival analysis skipped: ") + e.what());
      }
    }
    manifest.quantum_run = true;
  }

  if (want_classical) {
    auto t0 = steady_clock::now();
    TrajectoryEnsemble initial =
        sample_initial(mol, config.n_traj, config.seed);
    manifest.timings.emplace_back("classical_sample", seconds_since(t0));

    t0 = steady_clock::now();
    ClassicalOptions copts;
    copts.step = config.classical_step_ps * units::au_per_ps;
    copts.theta_bins = config.theta_bins;
    ClassicalRunResult result = integrate(initial, mol, pulse, grid, copts);
    manifest.timings.emplace_back("classical_integrate", seconds_since(t0));

    cseries = std::move(result.series);
    files.emplace_back("classical_series.csv", series_csv(cseries));
    if (config.analysis_distribution)
      files.emplace_back("classical_distribution.csv",
                         distribution_csv(result.distribution));
    manifest.classical_run = true;
    manifest.n_traj = config.n_traj;
    manifest.seed = config.seed;
    manifest.conservation = result.conservation;
  }

  if (want_quantum && want_classical) {
    try {
      analysis["baseline_comparison"] =
          baseline_json(baseline_comparison(qseries, cseries, mol,
                                            pulse.center));
    } catch (const InsufficientSpan& e) {
      notes.push_back(std::string("baseline comparison skipped: ") + e.what());
    }
  } else {
    notes.push_back("baseline comparison skipped (needs mode = both)");
  }
  analysis["notes"] = notes;
  files.emplace_back("analysis.json", analysis.dump(2) + "\n");

  const auto io0 = steady_clock::now();
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    manifest.checksums.emplace_back(name, fnv1a_hex(content));
  }
  manifest.timings.emplace_back("io", seconds_since(io0));
  manifest.wall_seconds = seconds_since(wall0);

  write_file(dir / "manifest.json", manifest_json(manifest).dump(2) + "\n");
  return manifest;
}

namespace {

// Peak thermal mean_cos2 across the configured grid at the given
// anisotropy.  The basis search runs on the hottest populated level,
// which does not bound every member's truncation tail, so overflow
// during the ensemble propagation climbs the ladder further.
double ensemble_peak(const RunConfig& base, double delta_alpha_A3) {
  RunConfig c = base;
  c.delta_alpha_A3 = delta_alpha_A3;
  const MoleculeSpec mol = c.molecule();
  const PulseSpec pulse = c.pulse_spec();
  const std::vector<double> grid = c.make_grid();
  PropagationOptions opts;
  opts.step_scale = c.step_scale;
  ThermalEnsemble ensemble = thermal_members(mol, c.thermal_cutoff);
  int J_max = converge_jmax({ensemble.max_J0, 0}, mol, pulse, grid,
                            c.jmax_tol, opts)
                  .J_max;
  for (;;) {
    try {
      propagate_ensemble(ensemble.members, mol, pulse, grid, J_max, opts);
      break;
    } catch (const TruncationOverflow&) {
      int next = 0;
      for (const int rung : jmax_ladder())
        if (rung > J_max) {
          next = rung;
          break;
        }
      if (next == 0) throw;
      J_max = next;
    }
  }
  DensityBlockSeries density =
      assemble_density(ensemble.members, grid, J_max);
  ObservableSeries series = quantum_observables(density);
  return *std::max_element(series.mean_cos2.begin(), series.mean_cos2.end());
}

}  // namespace

double calibrate_delta_alpha(const RunConfig& config, double target_peak) {
  if (!(target_peak > 1.0 / 3.0 && target_peak < 1.0))
    throw std::invalid_argument("calibration target must lie in (1/3, 1), got " +
                                fmt(target_peak));
  constexpr double kLo = 0.1, kHi = 100.0;  // A^3
  constexpr double kTol = 1e-3;
  double lo = kLo, hi = kHi;
  const double peak_lo = ensemble_peak(config, lo);
  if (std::abs(peak_lo - target_peak) <= kTol) return lo;
  const double peak_hi = ensemble_peak(config, hi);
  if (std::abs(peak_hi - target_peak) <= kTol) return hi;
  if (target_peak < peak_lo || target_peak > peak_hi)
    throw NoConvergence("calibration target " + fmt(target_peak) +
                        " outside the reachable peak range [" + fmt(peak_lo) +
                        ", " + fmt(peak_hi) + "] for delta_alpha in [" +
                        fmt(kLo) + ", " + fmt(kHi) + "] A^3");
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double peak = ensemble_peak(config, mid);
    if (std::abs(peak - target_peak) <= kTol) return mid;
    if (peak < target_peak)
      lo = mid;
    else
      hi = mid;
  }
  throw NoConvergence(
      "calibration bisection exhausted 40 iterations without reaching the "
      "target within 1e-3");
}

}  // namespace rotorfluc
