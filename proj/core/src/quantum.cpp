#include "rotorfluc/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "rotorfluc/constants.hpp"
#include "rotorfluc/errors.hpp"
#include "rotorfluc/parallel.hpp"

namespace rotorfluc {

ThermalEnsemble thermal_members(const MoleculeSpec& mol, double cutoff) {
  if (!(cutoff > 0.0 && cutoff <= 1.0))
    throw std::invalid_argument("thermal_members: cutoff must be in (0, 1]");

  ThermalEnsemble ens;
  const double kT = units::kB_hartree_per_K * mol.temperature;
  if (mol.temperature <= 0.0 || kT <= 0.0) {
    ens.members.push_back({RotorLevel{0, 0}, 1.0, nullptr});
    return ens;
  }

  // Partition function first; shells decay fast at any sane kT/B.
  double Z = 0.0;
  int J_top = 0;
  for (int J = 0;; ++J) {
    const double w = std::exp(-mol.B * J * (J + 1) / kT);
    const double shell = (2.0 * J + 1.0) * w;
    Z += shell;
    J_top = J;
    if (J > 0 && shell < Z * 1e-18) break;
    if (J > 100000)
      throw std::invalid_argument("thermal_members: partition sum diverges");
  }

  // Keep whole J shells so the truncated ensemble remains isotropic.
  double cum = 0.0;
  for (int J = 0; J <= J_top; ++J) {
    const double w = std::exp(-mol.B * J * (J + 1) / kT) / Z;
    if (cutoff >= 1.0 && w < 1e-15 && J > 0) break;
    for (int M = -J; M <= J; ++M)
      ens.members.push_back({RotorLevel{J, M}, w, nullptr});
    cum += (2.0 * J + 1.0) * w;
    ens.max_J0 = J;
    if (cutoff < 1.0 && cum >= cutoff) break;
  }
  ens.achieved_weight = cum;
  for (auto& m : ens.members) m.weight /= cum;
  return ens;
}

namespace {

struct Mark {
  double t;
  int grid_idx;  // -1 for pulse window edges
};

struct BlockPropagator {
  BasisBlock block;
  Eigen::VectorXd energies;   // B J(J+1)
  Eigen::MatrixXcd V;         // eigenvectors of the cos^2 matrix
  Eigen::VectorXd lambda_w;   // eigenvalues of cos^2 - 1/3

  explicit BlockPropagator(const BasisBlock& b, double B) : block(b) {
    const int n = b.dim();
    energies.resize(n);
    for (int i = 0; i < n; ++i) {
      const double J = b.j_of(i);
      energies[i] = B * J * (J + 1.0);
    }
    const Eigen::MatrixXd c2 = cos2_operator(b).dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c2);
    V = es.eigenvectors().cast<std::complex<double>>();
    lambda_w = es.eigenvalues().array() - 1.0 / 3.0;
  }

  void free_flight(Eigen::VectorXcd& c, double dt) const {
    for (int i = 0; i < c.size(); ++i)
      c[i] *= std::polar(1.0, -energies[i] * dt);
  }

  void split_step(Eigen::VectorXcd& c, double dt, double kbar) const {
    free_flight(c, 0.5 * dt);
    Eigen::VectorXcd y = V.adjoint() * c;
    for (int i = 0; i < y.size(); ++i)
      y[i] *= std::polar(1.0, kbar * dt * lambda_w[i]);
    c.noalias() = V * y;
    free_flight(c, 0.5 * dt);
  }
};

}  // namespace

std::pair<Trajectory, PropagationStats> propagate(
    const RotorLevel& initial, const MoleculeSpec& mol, const PulseSpec& pulse,
    std::span<const double> grid, int J_max, const PropagationOptions& opts) {
  const int m = std::abs(initial.M);
  if (initial.J < m)
    throw std::invalid_argument("propagate: |M0| exceeds J0");
  // Physical headroom above J0 is converge_jmax's job; here the basis
  // only has to contain the initial level, and the top-row population
  // guard reports any spill.
  if (J_max < initial.J)
    throw std::invalid_argument("propagate: J_max below J0");
  if (grid.empty())
    throw std::invalid_argument("propagate: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("propagate: grid must be strictly increasing");

  const BasisBlock block{initial.M, J_max};
  const BlockPropagator prop(block, mol.B);
  const int n = block.dim();

  const bool pulsed = pulse.peak_intensity > 0.0;
  const double t_init =
      pulsed ? std::min(grid.front(), pulse.window_start()) : grid.front();

  std::vector<Mark> marks;
  marks.reserve(grid.size() + 2);
  for (std::size_t i = 0; i < grid.size(); ++i)
    marks.push_back({grid[i], int(i)});
  if (pulsed) {
    for (const double edge : {pulse.window_start(), pulse.window_end()})
      if (edge > t_init && edge < grid.back())
        marks.push_back({edge, -1});
  }
  std::sort(marks.begin(), marks.end(),
            [](const Mark& a, const Mark& b) { return a.t < b.t; });

  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  c[block.index_of(initial.J)] = 1.0;

  Trajectory out(grid.size());
  PropagationStats stats;
  stats.dt_min = std::numeric_limits<double>::infinity();

  double t_cur = t_init;
  for (const Mark& mark : marks) {
    const double dt_full = mark.t - t_cur;
    if (dt_full > 0.0) {
      const double mid = 0.5 * (t_cur + mark.t);
      if (pulsed && pulse.in_window(mid)) {
        // Freeze k at substep midpoints; step partition depends only on
        // the segment and budgets, so a mirrored schedule retraces it.
        double k_ref;
        if (pulse.center >= t_cur && pulse.center <= mark.t)
          k_ref = coupling_strength(mol, pulse, pulse.center);
        else
          k_ref = std::max(coupling_strength(mol, pulse, t_cur),
                           coupling_strength(mol, pulse, mark.t));
        const double scale = std::max(opts.step_scale, 1e-12);
        const double dt_k =
            opts.k_phase_budget * scale / std::max(k_ref, 1e-300);
        const double dt_b = opts.B_phase_budget * scale /
                            std::max(mol.B * J_max * (J_max + 1.0), 1e-300);
        const double dt_cap = std::min({dt_k, dt_b, dt_full});
        const int n_sub = std::max(1, int(std::ceil(dt_full / dt_cap - 1e-12)));
        const double h = dt_full / n_sub;
        for (int s = 0; s < n_sub; ++s) {
          const double tm = t_cur + (s + 0.5) * h;
          prop.split_step(c, h, coupling_strength(mol, pulse, tm));
        }
        stats.steps += n_sub;
        stats.dt_min = std::min(stats.dt_min, h);
        stats.dt_max = std::max(stats.dt_max, h);
      } else {
        prop.free_flight(c, dt_full);
      }
      t_cur = mark.t;
    }
    if (mark.grid_idx >= 0) {
      out[mark.grid_idx].assign(c.data(), c.data() + n);
      const double norm = c.norm();
      stats.norm_drift = std::max(stats.norm_drift, std::abs(norm - 1.0));
      if (stats.norm_drift > 1e-8)
        throw StepFailure("propagate: norm drift exceeded 1e-8");
      double top = std::norm(c[n - 1]);
      if (n >= 2) top += std::norm(c[n - 2]);
      stats.top_population = std::max(stats.top_population, top);
      if (top > opts.top_tolerance)
        throw TruncationOverflow(
            "propagate: population reached the top of the J ladder (J_max " +
                std::to_string(J_max) + ", M " + std::to_string(initial.M) + ")",
            top);
    }
  }
  if (stats.steps == 0) stats.dt_min = 0.0;
  return {std::move(out), stats};
}

namespace {

// Peak mean and peak delta of cos^2 over one member trajectory.
std::pair<double, double> trajectory_peaks(const Trajectory& traj,
                                           const BasisBlock& block) {
  const BandedOperator c2 = cos2_operator(block);
  const BandedOperator c4 = cos4_operator(block);
  double peak_mean = 0.0, peak_delta = 0.0;
  for (const auto& c : traj) {
    const double m2 = c2.expectation(c);
    const double m4 = c4.expectation(c);
    const double var = std::max(0.0, m4 - m2 * m2);
    peak_mean = std::max(peak_mean, m2);
    peak_delta = std::max(peak_delta, std::sqrt(var));
  }
  return {peak_mean, peak_delta};
}

constexpr int kLadder[] = {8, 12, 16, 24, 32, 48, 64, 96, 128};
constexpr int kMargin = 4;

}  // namespace

std::span<const int> jmax_ladder() { return kLadder; }

ConvergenceResult converge_jmax(const RotorLevel& initial,
                                const MoleculeSpec& mol,
                                const PulseSpec& pulse,
                                std::span<const double> grid, double tol,
                                const PropagationOptions& opts) {
  if (!(tol > 0.0))
    throw NoConvergence("converge_jmax: tolerance must be positive");

  ConvergenceResult prev;
  bool have_prev = false;
  ConvergenceResult result;
  for (const int rung : kLadder) {
    if (rung < initial.J + kMargin) continue;
    result.ladder_tried.push_back(rung);
    double pm, pd;
    try {
      const auto [traj, st] =
          propagate(initial, mol, pulse, grid, rung, opts);
      std::tie(pm, pd) =
          trajectory_peaks(traj, BasisBlock{initial.M, rung});
    } catch (const TruncationOverflow&) {
      have_prev = false;
      continue;
    }
    if (have_prev && std::abs(pm - prev.peak_mean_cos2) < tol &&
        std::abs(pd - prev.peak_delta_cos2) < tol) {
      prev.ladder_tried = result.ladder_tried;
      return prev;
    }
    prev.J_max = rung;
    prev.peak_mean_cos2 = pm;
    prev.peak_delta_cos2 = pd;
    have_prev = true;
  }
  throw NoConvergence("converge_jmax: basis ladder exhausted for J0 " +
                      std::to_string(initial.J) + ", M0 " +
                      std::to_string(initial.M));
}

PropagationStats propagate_ensemble(std::vector<EnsembleMember>& members,
                                    const MoleculeSpec& mol,
                                    const PulseSpec& pulse,
                                    std::span<const double> grid, int J_max,
                                    const PropagationOptions& opts) {
  // +M and -M blocks evolve identically from |J0, +-M0>, so propagate
  // each unique (J0, |M0|) once and share the coefficients.
  std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < members.size(); ++i)
    groups[{members[i].initial.J, std::abs(members[i].initial.M)}].push_back(i);

  std::vector<std::pair<int, int>> keys;
  keys.reserve(groups.size());
  for (const auto& [key, idx] : groups) keys.push_back(key);

  std::vector<std::shared_ptr<const Trajectory>> trajectories(keys.size());
  std::vector<PropagationStats> stats(keys.size());
  parallel_for(keys.size(), [&](std::size_t k) {
    const RotorLevel lvl{keys[k].first, keys[k].second};
    auto [traj, st] = propagate(lvl, mol, pulse, grid, J_max, opts);
    trajectories[k] = std::make_shared<const Trajectory>(std::move(traj));
    stats[k] = st;
  });

  PropagationStats agg;
  agg.dt_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < keys.size(); ++k) {
    for (const std::size_t i : groups[keys[k]])
      members[i].trajectory = trajectories[k];
    agg.steps = std::max(agg.steps, stats[k].steps);
    agg.dt_min = std::min(agg.dt_min, stats[k].dt_min);
    agg.dt_max = std::max(agg.dt_max, stats[k].dt_max);
    agg.norm_drift = std::max(agg.norm_drift, stats[k].norm_drift);
    agg.top_population = std::max(agg.top_population, stats[k].top_population);
  }
  if (keys.empty()) agg.dt_min = 0.0;
  return agg;
}

double DensityBlockSeries::Block::trace_at(std::size_t ti) const {
  const int n = dim();
  double tr = 0.0;
  for (int i = 0; i < n; ++i) tr += band0[ti * n + i];
  return tr;
}

Eigen::MatrixXcd DensityBlockSeries::Block::dense_at(std::size_t ti) const {
  const int n = dim();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) rho(i, i) = band0[ti * n + i];
  for (int i = 0; i + 2 < n; ++i) {
    rho(i, i + 2) = band2[ti * (n - 2) + i];
    rho(i + 2, i) = std::conj(rho(i, i + 2));
  }
  for (int i = 0; i + 4 < n; ++i) {
    rho(i, i + 4) = band4[ti * (n - 4) + i];
    rho(i + 4, i) = std::conj(rho(i, i + 4));
  }
  return rho;
}

DensityBlockSeries assemble_density(const std::vector<EnsembleMember>& members,
                                    std::span<const double> grid, int J_max) {
  const std::size_t nt = grid.size();
  for (const auto& m : members) {
    if (!m.trajectory)
      throw std::invalid_argument("assemble_density: member lacks a trajectory");
    if (m.trajectory->size() != nt)
      throw std::invalid_argument("assemble_density: trajectory/grid mismatch");
  }

  DensityBlockSeries density;
  density.grid.assign(grid.begin(), grid.end());

  std::map<int, std::vector<std::size_t>> by_m;
  for (std::size_t i = 0; i < members.size(); ++i)
    by_m[members[i].initial.M].push_back(i);

  for (const auto& [M, idx] : by_m) {
    DensityBlockSeries::Block blk;
    blk.M = M;
    blk.J_max = J_max;
    density.blocks.push_back(std::move(blk));
  }

  parallel_for(density.blocks.size(), [&](std::size_t bi) {
    auto& blk = density.blocks[bi];
    const int n = blk.dim();
    blk.band0.assign(nt * n, 0.0);
    blk.band2.assign(nt * std::max(0, n - 2), {0.0, 0.0});
    blk.band4.assign(nt * std::max(0, n - 4), {0.0, 0.0});
    for (const std::size_t mi : by_m.at(blk.M)) {
      const auto& member = members[mi];
      const double w = member.weight;
      const Trajectory& traj = *member.trajectory;
      for (std::size_t ti = 0; ti < nt; ++ti) {
        const auto& c = traj[ti];
        if (int(c.size()) != n)
          throw std::invalid_argument(
              "assemble_density: trajectory dimension mismatch");
        for (int i = 0; i < n; ++i)
          blk.band0[ti * n + i] += w * std::norm(c[i]);
        for (int i = 0; i + 2 < n; ++i)
          blk.band2[ti * (n - 2) + i] += w * c[i] * std::conj(c[i + 2]);
        for (int i = 0; i + 4 < n; ++i)
          blk.band4[ti * (n - 4) + i] += w * c[i] * std::conj(c[i + 4]);
      }
    }
  });
  return density;
}

}  // namespace rotorfluc
