#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rotorfluc/observables.hpp"
#include "rotorfluc/pulse.hpp"

namespace rotorfluc {

// Rigid linear rotor in vector form: axis direction u (unit) and
// angular momentum L (units of hbar) with u . L = 0.  The moment of
// inertia hbar^2/(2B) lives on MoleculeSpec.
struct ClassicalRotorState {
  Eigen::Vector3d u = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d L = Eigen::Vector3d::Zero();
};

struct TrajectoryEnsemble {
  std::vector<ClassicalRotorState> states;
  std::uint64_t seed = 0;
  bool zero_angular_momentum = false;  // |L| = 0 microcanonical variant
};

// u uniform on the sphere, L uniform in direction within the plane
// perpendicular to u, |L| Rayleigh with scale sqrt(I k_B T).  Each
// trajectory draws from its own counter-based stream, so the sample is
// reproducible for any thread count.  T <= 0 is invalid unless the
// |L| = 0 microcanonical ensemble is requested explicitly.
TrajectoryEnsemble sample_initial(const MoleculeSpec& mol, std::size_t n,
                                  std::uint64_t seed,
                                  bool zero_angular_momentum = false);

struct ClassicalMoments {
  double mean_cos2 = 0.0;
  double mean_cos4 = 0.0;
};
ClassicalMoments classical_moments(std::span<const ClassicalRotorState> states);

struct ConservationStats {
  double max_unit_dev = 0.0;        // | |u| - 1 |
  double max_orth_dev = 0.0;        // |u . L|
  double max_Lz_drift = 0.0;        // vs the trajectory's initial Lz
  double max_energy_drift = 0.0;    // field-free |dE| / k_B T
};

struct ClassicalOptions {
  double step = 0.0;             // RK4 step inside the window (au); 0 = auto
  int substep_divisor = 200;     // auto rule: min(fwhm, rotation period)/this
  int theta_bins = 256;
  double energy_tolerance = 1e-6;  // field-free |dE|/k_B T per segment
};

struct ClassicalRunResult {
  ObservableSeries series;
  AngularDistributionSeries distribution;
  TrajectoryEnsemble final_states;
  ConservationStats conservation;
};

// Drives every trajectory across the output grid: fixed-step RK4 on
// du/dt = (L x u)/I, dL/dt = 2 k(t)(u.z)(u x z) inside the pulse
// window (u renormalized and L re-projected after each step), exact
// free-rotor rotation outside.  Reductions into the time-binned
// accumulators run in fixed chunk order, so results do not depend on
// the worker count.  Throws StepFailure if a field-free segment drifts
// in energy beyond options.energy_tolerance * k_B T.
ClassicalRunResult integrate(const TrajectoryEnsemble& ensemble,
                             const MoleculeSpec& mol, const PulseSpec& pulse,
                             std::span<const double> grid,
                             const ClassicalOptions& options = {});

}  // namespace rotorfluc
