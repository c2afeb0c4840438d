#include "rotorfluc/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rotorfluc/constants.hpp"
#include "rotorfluc/errors.hpp"
#include "rotorfluc/parallel.hpp"
#include "rotorfluc/rng.hpp"

namespace rotorfluc {

TrajectoryEnsemble sample_initial(const MoleculeSpec& mol, std::size_t n,
                                  std::uint64_t seed,
                                  bool zero_angular_momentum) {
  if (n < 1) throw std::invalid_argument("sample_initial: need n >= 1");
  const double kT = units::kB_hartree_per_K * mol.temperature;
  if (!zero_angular_momentum && kT <= 0.0)
    throw std::invalid_argument(
        "sample_initial: T <= 0 has no classical thermal ensemble; request "
        "the zero-angular-momentum flag instead");

  const double I_mom = mol.moment_of_inertia();
  TrajectoryEnsemble ens;
  ens.seed = seed;
  ens.zero_angular_momentum = zero_angular_momentum;
  ens.states.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, i);
    const double z = 1.0 - 2.0 * rng.next_double();
    const double phi = 2.0 * units::pi * rng.next_double();
    const double psi = 2.0 * units::pi * rng.next_double();
    const double xi = rng.next_double_open_zero();

    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    ClassicalRotorState st;
    st.u = {s * std::cos(phi), s * std::sin(phi), z};

    if (!zero_angular_momentum) {
      const double Lmag = std::sqrt(-2.0 * I_mom * kT * std::log(xi));
      Eigen::Vector3d a = st.u.cross(Eigen::Vector3d::UnitZ());
      if (a.norm() < 1e-12) a = Eigen::Vector3d::UnitX();
      a -= a.dot(st.u) * st.u;
      a.normalize();
      const Eigen::Vector3d b = st.u.cross(a);
      st.L = Lmag * (std::cos(psi) * a + std::sin(psi) * b);
    }
    ens.states[i] = st;
  }
  return ens;
}

ClassicalMoments classical_moments(
    std::span<const ClassicalRotorState> states) {
  ClassicalMoments m;
  for (const auto& st : states) {
    const double c2 = st.u.z() * st.u.z();
    m.mean_cos2 += c2;
    m.mean_cos4 += c2 * c2;
  }
  if (!states.empty()) {
    m.mean_cos2 /= double(states.size());
    m.mean_cos4 /= double(states.size());
  }
  return m;
}

namespace {

struct Derivative {
  Eigen::Vector3d du;
  Eigen::Vector3d dL;
};

Derivative force(const ClassicalRotorState& s, double k, double inv_I) {
  Derivative d;
  d.du = s.L.cross(s.u) * inv_I;
  // 2k (u.z)(u x z); z-component identically zero, so Lz never drifts.
  d.dL = 2.0 * k * s.u.z() * s.u.cross(Eigen::Vector3d::UnitZ());
  return d;
}

void rk4_step(ClassicalRotorState& s, double t, double h,
              const MoleculeSpec& mol, const PulseSpec& pulse) {
  const double inv_I = 1.0 / mol.moment_of_inertia();
  const auto k_at = [&](double tt) { return coupling_strength(mol, pulse, tt); };

  const Derivative k1 = force(s, k_at(t), inv_I);
  ClassicalRotorState s2{s.u + 0.5 * h * k1.du, s.L + 0.5 * h * k1.dL};
  const Derivative k2 = force(s2, k_at(t + 0.5 * h), inv_I);
  ClassicalRotorState s3{s.u + 0.5 * h * k2.du, s.L + 0.5 * h * k2.dL};
  const Derivative k3 = force(s3, k_at(t + 0.5 * h), inv_I);
  ClassicalRotorState s4{s.u + h * k3.du, s.L + h * k3.dL};
  const Derivative k4 = force(s4, k_at(t + h), inv_I);

  s.u += (h / 6.0) * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du);
  s.L += (h / 6.0) * (k1.dL + 2.0 * k2.dL + 2.0 * k3.dL + k4.dL);
  // RK4 contracts |u| by ~(h |L|/I)^6 / 72 per step; a large deviation
  // means the step cannot resolve the precession at all, and silent
  // renormalization would hide that.
  const double n2 = s.u.squaredNorm();
  if (!(std::abs(n2 - 1.0) < 0.25))
    throw StepFailure("integrate: step too large for the rotation rate");
  s.u.normalize();
  s.L -= s.L.dot(s.u) * s.u;
}

// Exact free-rotor move: u turns about L by |L|/I * dt.
void free_rotation(ClassicalRotorState& s, double dt, double I_mom) {
  const double Lmag = s.L.norm();
  if (Lmag < 1e-300) return;
  const Eigen::Vector3d axis = s.L / Lmag;
  const double angle = Lmag / I_mom * dt;
  const double c = std::cos(angle), sn = std::sin(angle);
  s.u = c * s.u + sn * axis.cross(s.u) + (1.0 - c) * axis.dot(s.u) * axis;
  s.u.normalize();
}

struct Mark {
  double t;
  int grid_idx;
};

}  // namespace

ClassicalRunResult integrate(const TrajectoryEnsemble& ensemble,
                             const MoleculeSpec& mol, const PulseSpec& pulse,
                             std::span<const double> grid,
                             const ClassicalOptions& options) {
  const std::size_t n = ensemble.states.size();
  if (n == 0) throw std::invalid_argument("integrate: empty ensemble");
  if (grid.empty()) throw std::invalid_argument("integrate: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("integrate: grid must be strictly increasing");
  if (options.theta_bins < 1)
    throw std::invalid_argument("integrate: theta_bins < 1");

  const std::size_t nt = grid.size();
  const std::size_t nb = std::size_t(options.theta_bins);
  const double I_mom = mol.moment_of_inertia();
  const double kT_scale =
      std::max(units::kB_hartree_per_K * mol.temperature, mol.B);

  const double t_init = std::min<double>(grid.front(), pulse.window_start());
  std::vector<Mark> marks;
  marks.reserve(nt + 2);
  for (std::size_t i = 0; i < nt; ++i) marks.push_back({grid[i], int(i)});
  for (const double edge : {pulse.window_start(), pulse.window_end()})
    if (edge > t_init && edge < grid.back()) marks.push_back({edge, -1});
  std::sort(marks.begin(), marks.end(),
            [](const Mark& a, const Mark& b) { return a.t < b.t; });

  constexpr std::size_t kChunk = 1024;
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  const double dtheta = units::pi / double(options.theta_bins);

  struct ChunkAccum {
    std::vector<double> m2, m4;
    ConservationStats cons;
  };
  std::vector<ChunkAccum> chunks(n_chunks);

  const unsigned max_workers = worker_count();
  std::vector<std::vector<std::uint64_t>> worker_hist(max_workers);

  ClassicalRunResult result;
  result.final_states.seed = ensemble.seed;
  result.final_states.zero_angular_momentum = ensemble.zero_angular_momentum;
  result.final_states.states.resize(n);

  parallel_for_worker(n_chunks, max_workers, [&](std::size_t ci, unsigned w) {
    auto& acc = chunks[ci];
    acc.m2.assign(nt, 0.0);
    acc.m4.assign(nt, 0.0);
    auto& hist = worker_hist[w];
    if (hist.empty()) hist.assign(nt * nb, 0);

    const std::size_t lo = ci * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      ClassicalRotorState s = ensemble.states[i];
      const double Lz0 = s.L.z();
      double t_cur = t_init;
      for (const Mark& mark : marks) {
        const double dt_full = mark.t - t_cur;
        if (dt_full > 0.0) {
          const double mid = 0.5 * (t_cur + mark.t);
          if (pulse.in_window(mid)) {
            double h_cap = options.step;
            if (h_cap <= 0.0) {
              const double Lmag = s.L.norm();
              const double t_rot =
                  (Lmag > 1e-300) ? 2.0 * units::pi * I_mom / Lmag
                                  : pulse.fwhm;
              h_cap = std::min(pulse.fwhm, t_rot) / options.substep_divisor;
            }
            const int n_sub =
                std::max(1, int(std::ceil(dt_full / h_cap - 1e-12)));
            const double h = dt_full / n_sub;
            const bool field_free =
                coupling_strength(mol, pulse, mid) == 0.0 &&
                coupling_strength(mol, pulse, t_cur) == 0.0 &&
                coupling_strength(mol, pulse, mark.t) == 0.0;
            const double E0 = s.L.squaredNorm() / (2.0 * I_mom);
            for (int sub = 0; sub < n_sub; ++sub)
              rk4_step(s, t_cur + sub * h, h, mol, pulse);
            if (field_free) {
              const double E1 = s.L.squaredNorm() / (2.0 * I_mom);
              const double drift = std::abs(E1 - E0) / kT_scale;
              acc.cons.max_energy_drift =
                  std::max(acc.cons.max_energy_drift, drift);
              if (drift > options.energy_tolerance)
                throw StepFailure(
                    "integrate: field-free energy drift beyond tolerance");
            }
          } else {
            free_rotation(s, dt_full, I_mom);
          }
          t_cur = mark.t;
        }
        if (mark.grid_idx >= 0) {
          const std::size_t ti = std::size_t(mark.grid_idx);
          const double uz = s.u.z();
          const double c2 = uz * uz;
          acc.m2[ti] += c2;
          acc.m4[ti] += c2 * c2;
          const double theta = std::acos(std::clamp(uz, -1.0, 1.0));
          std::size_t bin = std::size_t(theta / dtheta);
          if (bin >= nb) bin = nb - 1;
          ++hist[ti * nb + bin];
          acc.cons.max_unit_dev =
              std::max(acc.cons.max_unit_dev, std::abs(s.u.norm() - 1.0));
          acc.cons.max_orth_dev =
              std::max(acc.cons.max_orth_dev, std::abs(s.u.dot(s.L)));
          acc.cons.max_Lz_drift =
              std::max(acc.cons.max_Lz_drift, std::abs(s.L.z() - Lz0));
        }
      }
      result.final_states.states[i] = s;
    }
  });

  result.series.source = SeriesSource::classical;
  result.series.t.assign(grid.begin(), grid.end());
  result.series.mean_cos2.assign(nt, 0.0);
  result.series.mean_cos4.assign(nt, 0.0);
  result.series.delta_cos2.assign(nt, 0.0);
  for (const auto& acc : chunks) {
    for (std::size_t ti = 0; ti < nt; ++ti) {
      result.series.mean_cos2[ti] += acc.m2[ti];
      result.series.mean_cos4[ti] += acc.m4[ti];
    }
    result.conservation.max_unit_dev =
        std::max(result.conservation.max_unit_dev, acc.cons.max_unit_dev);
    result.conservation.max_orth_dev =
        std::max(result.conservation.max_orth_dev, acc.cons.max_orth_dev);
    result.conservation.max_Lz_drift =
        std::max(result.conservation.max_Lz_drift, acc.cons.max_Lz_drift);
    result.conservation.max_energy_drift = std::max(
        result.conservation.max_energy_drift, acc.cons.max_energy_drift);
  }
  for (std::size_t ti = 0; ti < nt; ++ti) {
    result.series.mean_cos2[ti] /= double(n);
    result.series.mean_cos4[ti] /= double(n);
    result.series.delta_cos2[ti] = delta_from_moments(
        result.series.mean_cos2[ti], result.series.mean_cos4[ti]);
  }

  result.distribution.t.assign(grid.begin(), grid.end());
  result.distribution.theta.resize(nb);
  for (std::size_t b = 0; b < nb; ++b)
    result.distribution.theta[b] = (double(b) + 0.5) * dtheta;
  result.distribution.density.assign(nt * nb, 0.0);
  for (const auto& hist : worker_hist) {
    if (hist.empty()) continue;
    for (std::size_t idx = 0; idx < nt * nb; ++idx)
      result.distribution.density[idx] += double(hist[idx]);
  }
  const double norm = 1.0 / (double(n) * dtheta);
  for (double& v : result.distribution.density) v *= norm;

  return result;
}

}  // namespace rotorfluc
