#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rotorfluc/pulse.hpp"
#include "rotorfluc/quantum.hpp"

namespace rotorfluc {

enum class SeriesSource { quantum, classical };

struct ObservableSeries {
  SeriesSource source = SeriesSource::quantum;
  std::vector<double> t;          // atomic units
  std::vector<double> mean_cos2;
  std::vector<double> mean_cos4;
  std::vector<double> delta_cos2;
};

// rho(theta, t) on uniform bin centers over [0, pi], sinTheta Jacobian
// included: an isotropic ensemble gives rho = sin(theta)/2 and
// sum_bins rho * dtheta = 1.
struct AngularDistributionSeries {
  std::vector<double> t;
  std::vector<double> theta;               // bin centers
  std::vector<double> density;             // row-major [t][bin]
  double at(std::size_t ti, std::size_t bi) const {
    return density[ti * theta.size() + bi];
  }
};

// Partition of <cos^4 theta> by |J - J'| of the contributing density
// matrix elements.
struct CoherenceDecomposition {
  std::vector<double> t;
  std::vector<double> c0, c2, c4;
};

// sqrt of the clamped variance; variance below -1e-10 means the inputs
// are inconsistent and raises std::runtime_error.
double delta_from_moments(double mean_cos2, double mean_cos4);

ObservableSeries quantum_observables(const DensityBlockSeries& density);

AngularDistributionSeries quantum_angular_distribution(
    const std::vector<EnsembleMember>& members, std::span<const double> grid,
    int theta_bins = 256);

CoherenceDecomposition coherence_decomposition(const DensityBlockSeries& density);

// Same partition applied to <cos^2 theta>: (dJ = 0, |dJ| = 2) parts.
std::pair<std::vector<double>, std::vector<double>> cos2_partition(
    const DensityBlockSeries& density);

// Level splittings carried by dJ = 2 and dJ = 4 coherences anchored at
// J: (2B(2J+3), 4B(2J+5)) in hartree.
std::pair<double, double> coherence_splittings(const MoleculeSpec& mol, int J);

struct RevivalFeature {
  int quarter = 0;               // k in t ~= k * tau_rev / 4
  double window_lo = 0.0, window_hi = 0.0;
  double t_mean_max = 0.0, mean_max = 0.0;
  double t_mean_min = 0.0, mean_min = 0.0;
  double t_delta_max = 0.0, delta_max = 0.0;
  double t_delta_min = 0.0, delta_min = 0.0;
  double mean_excursion = 0.0;   // max |mean - baseline| inside the window
  double delta_excursion = 0.0;
};

struct RevivalReport {
  double tau_rev = 0.0;
  double baseline_mean = 0.0;    // time average over [0.1, 1.0] tau_rev
  double baseline_delta = 0.0;   // minus the quarter-revival windows
  double global_peak_mean = 0.0;
  double t_global_peak = 0.0;
  double delta_at_global_peak = 0.0;
  std::vector<RevivalFeature> features;  // quarters 1..4 present in the grid
};

// Post-pulse revival structure; times measured from t0 (pulse center).
// Throws InsufficientSpan unless the series reaches 1.05 tau_rev past t0.
RevivalReport revival_analysis(const ObservableSeries& series,
                               const MoleculeSpec& mol, double t0 = 0.0);

struct BaselineComparison {
  double tau_rev = 0.0;
  double quantum_baseline_mean = 0.0;
  double quantum_baseline_delta = 0.0;
  double classical_plateau_mean = 0.0;
  double classical_plateau_delta = 0.0;
  // max |quantum - classical| for t - t0 < 0.15 tau_rev
  double early_max_diff_mean = 0.0;
  double early_max_diff_delta = 0.0;
  // max |series - its own plateau/baseline| for t - t0 > 0.25 tau_rev
  double classical_late_variation = 0.0;
  double quantum_late_variation = 0.0;
  // time averages of the quantum series over [0.1, 1.1] tau_rev
  double quantum_timeavg_mean = 0.0;
  double quantum_timeavg_delta = 0.0;
  bool classical_flat_after_quarter = false;
  bool quantum_structured_after_quarter = false;
  bool timeavg_mean_matches_baseline = false;
  bool timeavg_delta_below_baseline = false;
};

// Quantum and classical series must share the grid exactly.
BaselineComparison baseline_comparison(const ObservableSeries& quantum,
                                       const ObservableSeries& classical,
                                       const MoleculeSpec& mol,
                                       double t0 = 0.0);

}  // namespace rotorfluc
