#include "rotorfluc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rotorfluc/constants.hpp"
#include "rotorfluc/errors.hpp"
#include "rotorfluc/parallel.hpp"

namespace rotorfluc {

double delta_from_moments(double mean_cos2, double mean_cos4) {
  const double var = mean_cos4 - mean_cos2 * mean_cos2;
  if (var < -1e-10)
    throw std::runtime_error(
        "delta_from_moments: variance below -1e-10, inconsistent moments");
  return std::sqrt(std::max(0.0, var));
}

namespace {

// Tr[rho O] restricted to the |dJ| = d band; O real symmetric banded.
double band_trace(const DensityBlockSeries::Block& blk, std::size_t ti,
                  const BandedOperator& op, int d) {
  const int n = blk.dim();
  double acc = 0.0;
  if (d == 0) {
    for (int i = 0; i < n; ++i)
      acc += blk.band0[ti * n + i] * op.bands[0][i];
  } else if (d == 2) {
    for (int i = 0; i + 2 < n; ++i)
      acc += 2.0 * blk.band2[ti * (n - 2) + i].real() * op.bands[1][i];
  } else if (d == 4 && op.half_bandwidth >= 4) {
    for (int i = 0; i + 4 < n; ++i)
      acc += 2.0 * blk.band4[ti * (n - 4) + i].real() * op.bands[2][i];
  }
  return acc;
}

}  // namespace

ObservableSeries quantum_observables(const DensityBlockSeries& density) {
  const std::size_t nt = density.grid.size();
  ObservableSeries series;
  series.source = SeriesSource::quantum;
  series.t = density.grid;
  series.mean_cos2.assign(nt, 0.0);
  series.mean_cos4.assign(nt, 0.0);
  series.delta_cos2.assign(nt, 0.0);

  for (const auto& blk : density.blocks) {
    const BasisBlock basis{blk.M, blk.J_max};
    const BandedOperator c2 = cos2_operator(basis);
    const BandedOperator c4 = cos4_operator(basis);
    for (std::size_t ti = 0; ti < nt; ++ti) {
      series.mean_cos2[ti] +=
          band_trace(blk, ti, c2, 0) + band_trace(blk, ti, c2, 2);
      series.mean_cos4[ti] += band_trace(blk, ti, c4, 0) +
                              band_trace(blk, ti, c4, 2) +
                              band_trace(blk, ti, c4, 4);
    }
  }
  for (std::size_t ti = 0; ti < nt; ++ti)
    series.delta_cos2[ti] =
        delta_from_moments(series.mean_cos2[ti], series.mean_cos4[ti]);
  return series;
}

AngularDistributionSeries quantum_angular_distribution(
    const std::vector<EnsembleMember>& members, std::span<const double> grid,
    int theta_bins) {
  if (theta_bins < 1)
    throw std::invalid_argument("quantum_angular_distribution: bins < 1");
  const std::size_t nt = grid.size();
  const std::size_t nb = std::size_t(theta_bins);

  AngularDistributionSeries dist;
  dist.t.assign(grid.begin(), grid.end());
  dist.theta.resize(nb);
  const double dtheta = units::pi / double(theta_bins);
  for (std::size_t b = 0; b < nb; ++b)
    dist.theta[b] = (double(b) + 0.5) * dtheta;
  dist.density.assign(nt * nb, 0.0);

  // theta tables per distinct |M|: table[b * dim + i] = Theta_{|M|+i}(x_b).
  std::map<int, std::vector<double>> tables;
  std::map<int, int> dims;
  for (const auto& m : members) {
    if (!m.trajectory || m.trajectory->size() != nt)
      throw std::invalid_argument(
          "quantum_angular_distribution: member trajectory missing or "
          "mismatched");
    const int absm = std::abs(m.initial.M);
    const int dim = int(m.trajectory->front().size());
    if (tables.count(absm)) continue;
    const int J_max = absm + dim - 1;
    std::vector<double> tab(nb * dim);
    for (std::size_t b = 0; b < nb; ++b) {
      const std::vector<double> col =
          theta_column(absm, J_max, std::cos(dist.theta[b]));
      std::copy(col.begin(), col.end(), tab.begin() + b * dim);
    }
    tables[absm] = std::move(tab);
    dims[absm] = dim;
  }

  parallel_for(nt, [&](std::size_t ti) {
    double* row = dist.density.data() + ti * nb;
    for (const auto& m : members) {
      const int absm = std::abs(m.initial.M);
      const std::vector<double>& tab = tables.at(absm);
      const int dim = dims.at(absm);
      const auto& c = (*m.trajectory)[ti];
      for (std::size_t b = 0; b < nb; ++b) {
        std::complex<double> amp = 0.0;
        const double* th = tab.data() + b * dim;
        for (int i = 0; i < dim; ++i) amp += c[i] * th[i];
        row[b] += m.weight * std::norm(amp) * std::sin(dist.theta[b]);
      }
    }
  });
  return dist;
}

CoherenceDecomposition coherence_decomposition(
    const DensityBlockSeries& density) {
  const std::size_t nt = density.grid.size();
  CoherenceDecomposition dec;
  dec.t = density.grid;
  dec.c0.assign(nt, 0.0);
  dec.c2.assign(nt, 0.0);
  dec.c4.assign(nt, 0.0);
  for (const auto& blk : density.blocks) {
    const BandedOperator c4 = cos4_operator(BasisBlock{blk.M, blk.J_max});
    for (std::size_t ti = 0; ti < nt; ++ti) {
      dec.c0[ti] += band_trace(blk, ti, c4, 0);
      dec.c2[ti] += band_trace(blk, ti, c4, 2);
      dec.c4[ti] += band_trace(blk, ti, c4, 4);
    }
  }
  return dec;
}

std::pair<std::vector<double>, std::vector<double>> cos2_partition(
    const DensityBlockSeries& density) {
  const std::size_t nt = density.grid.size();
  std::vector<double> d0(nt, 0.0), d2(nt, 0.0);
  for (const auto& blk : density.blocks) {
    const BandedOperator c2 = cos2_operator(BasisBlock{blk.M, blk.J_max});
    for (std::size_t ti = 0; ti < nt; ++ti) {
      d0[ti] += band_trace(blk, ti, c2, 0);
      d2[ti] += band_trace(blk, ti, c2, 2);
    }
  }
  return {std::move(d0), std::move(d2)};
}

std::pair<double, double> coherence_splittings(const MoleculeSpec& mol, int J) {
  if (J < 0) throw std::invalid_argument("coherence_splittings: J < 0");
  return {2.0 * mol.B * (2.0 * J + 3.0), 4.0 * mol.B * (2.0 * J + 5.0)};
}

namespace {

constexpr double kWindowHalf = 0.05;   // in units of tau_rev
constexpr double kBaselineLo = 0.1;
constexpr double kBaselineHi = 1.0;

bool in_baseline_window(double rel, double tau) {
  if (rel < kBaselineLo * tau || rel > kBaselineHi * tau) return false;
  for (int k = 1; k <= 4; ++k)
    if (std::abs(rel - k * tau / 4.0) <= kWindowHalf * tau) return false;
  return true;
}

struct Averages {
  double mean = 0.0;
  double delta = 0.0;
  std::size_t count = 0;
};

Averages baseline_averages(const ObservableSeries& s, double t0, double tau) {
  Averages avg;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (!in_baseline_window(s.t[i] - t0, tau)) continue;
    avg.mean += s.mean_cos2[i];
    avg.delta += s.delta_cos2[i];
    ++avg.count;
  }
  if (avg.count == 0)
    throw InsufficientSpan("baseline window contains no samples");
  avg.mean /= double(avg.count);
  avg.delta /= double(avg.count);
  return avg;
}

}  // namespace

RevivalReport revival_analysis(const ObservableSeries& series,
                               const MoleculeSpec& mol, double t0) {
  RevivalReport rep;
  rep.tau_rev = mol.revival_time();
  if (series.t.empty() || series.t.back() - t0 < 1.05 * rep.tau_rev)
    throw InsufficientSpan(
        "revival_analysis: series must reach 1.05 tau_rev past the pulse");

  const Averages base = baseline_averages(series, t0, rep.tau_rev);
  rep.baseline_mean = base.mean;
  rep.baseline_delta = base.delta;

  std::size_t gp = 0;
  for (std::size_t i = 1; i < series.t.size(); ++i)
    if (series.mean_cos2[i] > series.mean_cos2[gp]) gp = i;
  rep.global_peak_mean = series.mean_cos2[gp];
  rep.t_global_peak = series.t[gp] - t0;
  rep.delta_at_global_peak = series.delta_cos2[gp];

  for (int k = 1; k <= 4; ++k) {
    RevivalFeature f;
    f.quarter = k;
    f.window_lo = (k / 4.0 - kWindowHalf) * rep.tau_rev;
    f.window_hi = (k / 4.0 + kWindowHalf) * rep.tau_rev;
    bool any = false;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
      const double rel = series.t[i] - t0;
      if (rel < f.window_lo || rel > f.window_hi) continue;
      const double m = series.mean_cos2[i];
      const double d = series.delta_cos2[i];
      if (!any || m > f.mean_max) { f.mean_max = m; f.t_mean_max = rel; }
      if (!any || m < f.mean_min) { f.mean_min = m; f.t_mean_min = rel; }
      if (!any || d > f.delta_max) { f.delta_max = d; f.t_delta_max = rel; }
      if (!any || d < f.delta_min) { f.delta_min = d; f.t_delta_min = rel; }
      any = true;
    }
    if (!any) continue;
    f.mean_excursion = std::max(std::abs(f.mean_max - rep.baseline_mean),
                                std::abs(f.mean_min - rep.baseline_mean));
    f.delta_excursion = std::max(std::abs(f.delta_max - rep.baseline_delta),
                                 std::abs(f.delta_min - rep.baseline_delta));
    rep.features.push_back(f);
  }
  return rep;
}

BaselineComparison baseline_comparison(const ObservableSeries& quantum,
                                       const ObservableSeries& classical,
                                       const MoleculeSpec& mol, double t0) {
  if (quantum.t.size() != classical.t.size())
    throw std::invalid_argument("baseline_comparison: grid size mismatch");
  for (std::size_t i = 0; i < quantum.t.size(); ++i)
    if (std::abs(quantum.t[i] - classical.t[i]) >
        1e-9 * std::max(1.0, std::abs(quantum.t[i])))
      throw std::invalid_argument("baseline_comparison: grids differ");

  BaselineComparison cmp;
  cmp.tau_rev = mol.revival_time();
  const double tau = cmp.tau_rev;

  const Averages qb = baseline_averages(quantum, t0, tau);
  const Averages cb = baseline_averages(classical, t0, tau);
  cmp.quantum_baseline_mean = qb.mean;
  cmp.quantum_baseline_delta = qb.delta;
  cmp.classical_plateau_mean = cb.mean;
  cmp.classical_plateau_delta = cb.delta;

  double ta_mean = 0.0, ta_delta = 0.0;
  std::size_t ta_count = 0;
  for (std::size_t i = 0; i < quantum.t.size(); ++i) {
    const double rel = quantum.t[i] - t0;
    if (rel < 0.15 * tau) {
      cmp.early_max_diff_mean =
          std::max(cmp.early_max_diff_mean,
                   std::abs(quantum.mean_cos2[i] - classical.mean_cos2[i]));
      cmp.early_max_diff_delta =
          std::max(cmp.early_max_diff_delta,
                   std::abs(quantum.delta_cos2[i] - classical.delta_cos2[i]));
    }
    if (rel > 0.25 * tau) {
      cmp.classical_late_variation = std::max(
          {cmp.classical_late_variation,
           std::abs(classical.mean_cos2[i] - cb.mean),
           std::abs(classical.delta_cos2[i] - cb.delta)});
      cmp.quantum_late_variation = std::max(
          {cmp.quantum_late_variation,
           std::abs(quantum.mean_cos2[i] - qb.mean),
           std::abs(quantum.delta_cos2[i] - qb.delta)});
    }
    if (rel >= 0.1 * tau && rel <= 1.1 * tau) {
      ta_mean += quantum.mean_cos2[i];
      ta_delta += quantum.delta_cos2[i];
      ++ta_count;
    }
  }
  if (ta_count == 0)
    throw InsufficientSpan("baseline_comparison: revival window empty");
  cmp.quantum_timeavg_mean = ta_mean / double(ta_count);
  cmp.quantum_timeavg_delta = ta_delta / double(ta_count);

  cmp.classical_flat_after_quarter = cmp.classical_late_variation < 0.02;
  cmp.quantum_structured_after_quarter = cmp.quantum_late_variation > 0.02;
  cmp.timeavg_mean_matches_baseline =
      std::abs(cmp.quantum_timeavg_mean - cmp.quantum_baseline_mean) < 0.01;
  cmp.timeavg_delta_below_baseline =
      cmp.quantum_timeavg_delta < cmp.quantum_baseline_delta;
  return cmp;
}

}  // namespace rotorfluc
