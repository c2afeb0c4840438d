#include "rotorfluc/config.hpp"

#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rotorfluc/constants.hpp"
#include "rotorfluc/errors.hpp"

namespace rotorfluc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (map.count(key))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    map[key] = val;
  }
  return map;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ConfigMap& map) {
  std::string out;
  for (const auto& [k, v] : map) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::quantum: return "quantum";
    case RunMode::classical: return "classical";
    case RunMode::both: return "both";
  }
  return "both";
}

MoleculeSpec RunConfig::molecule() const {
  return MoleculeSpec::from_io(B_cm1, delta_alpha_A3, temperature_K);
}

PulseSpec RunConfig::pulse_spec() const {
  return PulseSpec::from_io(Imax_Wcm2, fwhm_ps, center_ps, window_factor);
}

std::vector<double> RunConfig::make_grid() const {
  if (grid_samples < 2) throw ConfigError("grid.samples must be >= 2");
  double start_ps = grid_start_ps, end_ps = grid_end_ps;
  if (grid_auto) {
    const double tau_ps = molecule().revival_time() * units::ps_per_au;
    if (fwhm_ps < 0.25 * tau_ps) {
      start_ps = center_ps - window_factor * fwhm_ps;
      end_ps = center_ps + 1.15 * tau_ps;
    } else {
      start_ps = center_ps - 1.5 * fwhm_ps;
      end_ps = center_ps + 1.5 * fwhm_ps;
    }
  }
  if (!(end_ps > start_ps)) throw ConfigError("grid span must be positive");
  std::vector<double> grid(grid_samples);
  const double a = start_ps * units::au_per_ps;
  const double b = end_ps * units::au_per_ps;
  for (int i = 0; i < grid_samples; ++i)
    grid[i] = a + (b - a) * double(i) / double(grid_samples - 1);
  return grid;
}

namespace {

class MapReader {
 public:
  explicit MapReader(const ConfigMap& map) : map_(map) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return map_.count(key) > 0;
  }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    const auto it = map_.find(key);
    if (it == map_.end()) return fallback;
    return parse_number(key, it->second);
  }

  double required_number(const std::string& key) {
    seen_.insert(key);
    const auto it = map_.find(key);
    if (it == map_.end()) throw ConfigError("missing required key '" + key + "'");
    return parse_number(key, it->second);
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    seen_.insert(key);
    const auto it = map_.find(key);
    if (it == map_.end()) return fallback;
    try {
      // stoull wraps negative input instead of rejecting it
      if (it->second.find('-') != std::string::npos)
        throw std::invalid_argument("negative");
      std::size_t pos = 0;
      const std::uint64_t v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trail");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected unsigned integer, got '" +
                        it->second + "'");
    }
  }

  int integer(const std::string& key, int fallback) {
    seen_.insert(key);
    const auto it = map_.find(key);
    if (it == map_.end()) return fallback;
    try {
      std::size_t pos = 0;
      const long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trail");
      if (v < INT_MIN || v > INT_MAX) throw std::invalid_argument("range");
      return int(v);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected integer, got '" +
                        it->second + "'");
    }
  }

  bool boolean(const std::string& key, bool fallback) {
    seen_.insert(key);
    const auto it = map_.find(key);
    if (it == map_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    seen_.insert(key);
    const auto it = map_.find(key);
    return it == map_.end() ? fallback : it->second;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : map_)
      if (!seen_.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }

 private:
  static double parse_number(const std::string& key, const std::string& text) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trail");
      if (!std::isfinite(v)) throw std::invalid_argument("nonfinite");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected finite number, got '" +
                        text + "'");
    }
  }

  const ConfigMap& map_;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig RunConfig::from_map(const ConfigMap& map) {
  MapReader r(map);
  RunConfig c;
  c.B_cm1 = r.number("molecule.B_cm1", c.B_cm1);
  c.delta_alpha_A3 = r.required_number("molecule.delta_alpha_A3");
  c.temperature_K = r.required_number("molecule.temperature_K");
  c.Imax_Wcm2 = r.required_number("pulse.Imax_Wcm2");
  c.fwhm_ps = r.required_number("pulse.fwhm_ps");
  c.center_ps = r.number("pulse.center_ps", c.center_ps);
  c.window_factor = r.number("pulse.window_factor", c.window_factor);

  const std::string mode = r.text("mode", "both");
  if (mode == "quantum") c.mode = RunMode::quantum;
  else if (mode == "classical") c.mode = RunMode::classical;
  else if (mode == "both") c.mode = RunMode::both;
  else throw ConfigError("mode must be quantum, classical or both");

  c.grid_samples = r.integer("grid.samples", c.grid_samples);
  const bool has_start = r.has("grid.start_ps");
  const bool has_end = r.has("grid.end_ps");
  if (has_start != has_end)
    throw ConfigError("grid.start_ps and grid.end_ps must come together");
  if (has_start) {
    c.grid_auto = false;
    c.grid_start_ps = r.required_number("grid.start_ps");
    c.grid_end_ps = r.required_number("grid.end_ps");
  }

  c.n_traj = r.unsigned_int("classical.n_traj", c.n_traj);
  c.seed = r.unsigned_int("classical.seed", c.seed);
  c.classical_step_ps = r.number("classical.step_ps", c.classical_step_ps);

  c.thermal_cutoff = r.number("quantum.thermal_cutoff", c.thermal_cutoff);
  c.jmax_tol = r.number("quantum.jmax_tol", c.jmax_tol);
  c.step_scale = r.number("quantum.step_scale", c.step_scale);

  c.theta_bins = r.integer("analysis.theta_bins", c.theta_bins);
  c.analysis_distribution =
      r.boolean("analysis.distribution", c.analysis_distribution);
  c.analysis_coherence = r.boolean("analysis.coherence", c.analysis_coherence);
  c.analysis_revival = r.boolean("analysis.revival", c.analysis_revival);

  c.out_dir = r.text("run.out_dir", c.out_dir);
  r.reject_unknown();

  // Fail fast on unphysical values.
  c.molecule();
  c.pulse_spec();
  if (c.grid_samples < 2) throw ConfigError("grid.samples must be >= 2");
  if (c.n_traj < 1) throw ConfigError("classical.n_traj must be >= 1");
  if (!(c.thermal_cutoff > 0.0 && c.thermal_cutoff <= 1.0))
    throw ConfigError("quantum.thermal_cutoff must be in (0, 1]");
  if (c.theta_bins < 1) throw ConfigError("analysis.theta_bins must be >= 1");
  return c;
}

ConfigMap RunConfig::to_map() const {
  ConfigMap m;
  m["molecule.B_cm1"] = format_double(B_cm1);
  m["molecule.delta_alpha_A3"] = format_double(delta_alpha_A3);
  m["molecule.temperature_K"] = format_double(temperature_K);
  m["pulse.Imax_Wcm2"] = format_double(Imax_Wcm2);
  m["pulse.fwhm_ps"] = format_double(fwhm_ps);
  m["pulse.center_ps"] = format_double(center_ps);
  m["pulse.window_factor"] = format_double(window_factor);
  m["mode"] = to_string(mode);
  m["grid.samples"] = std::to_string(grid_samples);
  if (!grid_auto) {
    m["grid.start_ps"] = format_double(grid_start_ps);
    m["grid.end_ps"] = format_double(grid_end_ps);
  }
  m["classical.n_traj"] = std::to_string(n_traj);
  m["classical.seed"] = std::to_string(seed);
  m["classical.step_ps"] = format_double(classical_step_ps);
  m["quantum.thermal_cutoff"] = format_double(thermal_cutoff);
  m["quantum.jmax_tol"] = format_double(jmax_tol);
  m["quantum.step_scale"] = format_double(step_scale);
  m["analysis.theta_bins"] = std::to_string(theta_bins);
  m["analysis.distribution"] = analysis_distribution ? "true" : "false";
  m["analysis.coherence"] = analysis_coherence ? "true" : "false";
  m["analysis.revival"] = analysis_revival ? "true" : "false";
  m["run.out_dir"] = out_dir;
  return m;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return B_cm1 == o.B_cm1 && delta_alpha_A3 == o.delta_alpha_A3 &&
         temperature_K == o.temperature_K && Imax_Wcm2 == o.Imax_Wcm2 &&
         fwhm_ps == o.fwhm_ps && center_ps == o.center_ps &&
         window_factor == o.window_factor && mode == o.mode &&
         grid_samples == o.grid_samples && grid_auto == o.grid_auto &&
         (grid_auto ||
          (grid_start_ps == o.grid_start_ps && grid_end_ps == o.grid_end_ps)) &&
         n_traj == o.n_traj && seed == o.seed &&
         classical_step_ps == o.classical_step_ps &&
         thermal_cutoff == o.thermal_cutoff && jmax_tol == o.jmax_tol &&
         step_scale == o.step_scale && theta_bins == o.theta_bins &&
         analysis_distribution == o.analysis_distribution &&
         analysis_coherence == o.analysis_coherence &&
         analysis_revival == o.analysis_revival && out_dir == o.out_dir;
}

ParsedConfig load_config(const std::string& path) {
  const ConfigMap map = parse_config_file(path);
  ParsedConfig parsed;
  parsed.config = RunConfig::from_map(map);
  for (const auto& [k, v] : map)
    if (k.rfind("classical.", 0) == 0) parsed.classical_keys_present = true;
  return parsed;
}

}  // namespace rotorfluc
