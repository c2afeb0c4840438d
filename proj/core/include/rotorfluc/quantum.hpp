#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rotorfluc/basis.hpp"
#include "rotorfluc/pulse.hpp"

namespace rotorfluc {

// Coefficient vectors sampled on the output grid: trajectory[ti][i] is
// c_J(t_i) with J = |M0| + i.
using Trajectory = std::vector<std::vector<std::complex<double>>>;

struct EnsembleMember {
  RotorLevel initial;
  double weight = 1.0;
  // Shared because +M and -M evolve identically; assemble_density and
  // the distribution builders only read it.
  std::shared_ptr<const Trajectory> trajectory;
};

struct ThermalEnsemble {
  std::vector<EnsembleMember> members;
  // Cumulative Boltzmann weight covered before renormalization.
  double achieved_weight = 1.0;
  int max_J0 = 0;
};

// Boltzmann-weighted (J0, M0) list at the molecule's temperature.
// Whole J shells are kept (each of the 2J+1 M states with equal
// weight) until the cumulative weight reaches the cutoff, so the
// pre-pulse ensemble stays exactly isotropic; weights then renormalize
// to 1.  cutoff = 1 caps at per-level weight < 1e-15.  T = 0 gives the
// single member (0,0).
ThermalEnsemble thermal_members(const MoleculeSpec& mol, double cutoff = 0.999);

struct PropagationOptions {
  // Phase accumulated per splitting step: k(t)*dt for the interaction,
  // B*J_max*(J_max+1)*dt for the free part (loose; the free factor is
  // applied exactly, the budget only limits how far k(t) is frozen).
  double k_phase_budget = 0.02;
  double B_phase_budget = 1.0;
  double step_scale = 1.0;       // multiplies both budgets
  double top_tolerance = 1e-8;   // max population allowed in top two J rows
};

struct PropagationStats {
  std::size_t steps = 0;         // splitting steps inside the pulse window
  double dt_min = 0.0;
  double dt_max = 0.0;
  double norm_drift = 0.0;       // max | ||c||^2 - 1 | over samples
  double top_population = 0.0;   // max over samples
};

// Solves i dc/dt = [B J(J+1) - k(t)(cos^2 - 1/3)] c in the M0 block by
// symmetric operator splitting: exact diagonal free flight around an
// exactly unitary interaction exponential (eigendecomposed once per
// block), k frozen at each substep midpoint.  Outside the pulse window
// the free flight covers whole segments in one hop.  The state is the
// free eigenstate |J0 M0> imposed at min(grid front, window start).
// Throws TruncationOverflow when the top two J rows accumulate more
// population than opts.top_tolerance.
std::pair<Trajectory, PropagationStats> propagate(
    const RotorLevel& initial, const MoleculeSpec& mol, const PulseSpec& pulse,
    std::span<const double> grid, int J_max,
    const PropagationOptions& opts = {});

struct ConvergenceResult {
  int J_max = 0;
  double peak_mean_cos2 = 0.0;
  double peak_delta_cos2 = 0.0;
  std::vector<int> ladder_tried;
};

// Basis sizes the convergence search walks, smallest first.
std::span<const int> jmax_ladder();

// Walks the basis ladder {8, 12, 16, 24, 32, 48, 64, 96, 128} (rungs
// below J0 + 4 skipped) and returns the smallest rung whose peak
// mean_cos2 and peak delta_cos2 agree with the next rung within tol.
ConvergenceResult converge_jmax(const RotorLevel& initial,
                                const MoleculeSpec& mol,
                                const PulseSpec& pulse,
                                std::span<const double> grid, double tol,
                                const PropagationOptions& opts = {});

// Propagates every member at a common J_max, filling the trajectory
// pointers (+M and -M share one propagation) and aggregating stats.
PropagationStats propagate_ensemble(std::vector<EnsembleMember>& members,
                                    const MoleculeSpec& mol,
                                    const PulseSpec& pulse,
                                    std::span<const double> grid, int J_max,
                                    const PropagationOptions& opts = {});

// Thermal density matrix in banded form, one block per signed M0.
// band entries: bandd[t*(dim-d) + i] = rho(i, i+d) = sum_m w c_i c*_{i+d};
// only even bands exist because every member has definite parity.
struct DensityBlockSeries {
  struct Block {
    int M = 0;
    int J_max = 0;
    std::vector<double> band0;
    std::vector<std::complex<double>> band2;
    std::vector<std::complex<double>> band4;

    int dim() const { return J_max - std::abs(M) + 1; }
    double trace_at(std::size_t ti) const;
    Eigen::MatrixXcd dense_at(std::size_t ti) const;
  };

  std::vector<double> grid;  // atomic units
  std::vector<Block> blocks;
};

DensityBlockSeries assemble_density(const std::vector<EnsembleMember>& members,
                                    std::span<const double> grid, int J_max);

}  // namespace rotorfluc
