#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rotorfluc/classical.hpp"
#include "rotorfluc/constants.hpp"
#include "rotorfluc/errors.hpp"
#include "rotorfluc/observables.hpp"
#include "rotorfluc/quantum.hpp"

using namespace rotorfluc;

namespace {

// One strong-kick thermal run shared by the suite: 0.5 K ensemble,
// 500 fs pulse at 2e12 W/cm2, grid spanning 1.15 revivals.
struct KickFixture {
  MoleculeSpec mol = MoleculeSpec::from_io(0.07941759, 4.0, 0.5);
  PulseSpec pulse = PulseSpec::from_io(2.0e12, 0.5, 0.0);
  std::vector<double> grid;
  ThermalEnsemble ens;
  DensityBlockSeries density;
  ObservableSeries series;
};

const KickFixture& kick_fixture() {
  static const KickFixture fix = [] {
    KickFixture f;
    const int n = 600;
    for (int i = 0; i < n; ++i)
      f.grid.push_back((-2.0 + 244.0 * i / double(n - 1)) * units::au_per_ps);
    f.ens = thermal_members(f.mol, 0.999);
    propagate_ensemble(f.ens.members, f.mol, f.pulse, f.grid, 40);
    f.density = assemble_density(f.ens.members, f.grid, 40);
    f.series = quantum_observables(f.density);
    return f;
  }();
  return fix;
}

}  // namespace

TEST_SUITE_BEGIN("observables");

TEST_CASE("delta_from_moments") {
  CHECK(delta_from_moments(1.0 / 3.0, 1.0 / 5.0) ==
        doctest::Approx(0.29814239699997195).epsilon(1e-14));
  CHECK(delta_from_moments(1.0, 1.0) == 0.0);
  // variance within rounding of zero clamps, far below zero throws
  CHECK(delta_from_moments(0.5, 0.25 - 1e-12) == 0.0);
  CHECK_THROWS_AS(delta_from_moments(0.5, 0.25 - 1e-7), std::runtime_error);
}

TEST_CASE("pre-pulse thermal moments are isotropic") {
  const auto& f = kick_fixture();
  CHECK(f.series.source == SeriesSource::quantum);
  REQUIRE(f.series.t.size() == f.grid.size());
  // first sample sits before the pulse window
  CHECK(std::abs(f.series.mean_cos2.front() - 1.0 / 3.0) < 1e-9);
  CHECK(std::abs(f.series.delta_cos2.front() - 0.29814239699997195) < 1e-9);
  // the kick aligns: some later sample clears the isotropic value
  const double peak =
      *std::max_element(f.series.mean_cos2.begin(), f.series.mean_cos2.end());
  CHECK(peak > 0.6);
}

TEST_CASE("angular distribution of pure states is analytic") {
  const MoleculeSpec mol = MoleculeSpec::from_io(0.07941759, 4.0, 0.5);
  const PulseSpec off = PulseSpec::from_io(0.0, 0.5, -100.0);
  const std::vector<double> grid = {0.0};
  const int bins = 128;
  const double dtheta = units::pi / bins;

  for (const RotorLevel level : {RotorLevel{0, 0}, RotorLevel{1, 0}}) {
    auto [traj, stats] = propagate(level, mol, off, grid, 8);
    EnsembleMember m;
    m.initial = level;
    m.weight = 1.0;
    m.trajectory = std::make_shared<Trajectory>(std::move(traj));
    const auto dist =
        quantum_angular_distribution({m}, grid, bins);
    REQUIRE(dist.theta.size() == std::size_t(bins));

    double total = 0.0, worst = 0.0;
    for (int b = 0; b < bins; ++b) {
      const double th = dist.theta[b];
      CHECK(th == doctest::Approx((b + 0.5) * dtheta).epsilon(1e-14));
      // |Y00|^2 = 1/4pi, |Y10|^2 = 3 cos^2/4pi, times 2 pi sin(theta)
      const double want = (level.J == 0)
                              ? 0.5 * std::sin(th)
                              : 1.5 * std::cos(th) * std::cos(th) * std::sin(th);
      worst = std::max(worst, std::abs(dist.at(0, b) - want));
      total += dist.at(0, b) * dtheta;
    }
    CHECK(worst < 1e-12);                 // pointwise at bin centers
    CHECK(std::abs(total - 1.0) < 1e-3);  // midpoint-rule quadrature
  }
}

TEST_CASE("kicked angular distribution stays normalized and positive") {
  const auto& f = kick_fixture();
  const int bins = 96;
  const auto dist = quantum_angular_distribution(f.ens.members, f.grid, bins);
  const double dtheta = units::pi / bins;
  for (const std::size_t ti : {std::size_t(0), f.grid.size() / 2,
                               f.grid.size() - 1}) {
    double total = 0.0, least = 0.0;
    for (int b = 0; b < bins; ++b) {
      total += dist.at(ti, b) * dtheta;
      least = std::min(least, dist.at(ti, b));
    }
    CHECK(std::abs(total - 1.0) < 1e-3);
    CHECK(least > -1e-12);
  }
  CHECK_THROWS_AS(quantum_angular_distribution(f.ens.members, f.grid, 0),
                  std::invalid_argument);
}

TEST_CASE("coherence partition is complete") {
  const auto& f = kick_fixture();
  const CoherenceDecomposition co = coherence_decomposition(f.density);
  const auto [d0, d2] = cos2_partition(f.density);
  REQUIRE(co.t.size() == f.grid.size());
  for (std::size_t ti = 0; ti < f.grid.size(); ++ti) {
    CHECK(std::abs(co.c0[ti] + co.c2[ti] + co.c4[ti] -
                   f.series.mean_cos4[ti]) < 1e-10);
    CHECK(std::abs(d0[ti] + d2[ti] - f.series.mean_cos2[ti]) < 1e-10);
  }
}

TEST_CASE("dJ = 0 terms freeze once the pulse is over") {
  const auto& f = kick_fixture();
  const CoherenceDecomposition co = coherence_decomposition(f.density);
  const auto [d0, d2] = cos2_partition(f.density);
  double c0_lo = 1e300, c0_hi = -1e300, d0_lo = 1e300, d0_hi = -1e300;
  for (std::size_t ti = 0; ti < f.grid.size(); ++ti) {
    if (f.grid[ti] <= f.pulse.window_end()) continue;
    c0_lo = std::min(c0_lo, co.c0[ti]);
    c0_hi = std::max(c0_hi, co.c0[ti]);
    d0_lo = std::min(d0_lo, d0[ti]);
    d0_hi = std::max(d0_hi, d0[ti]);
  }
  CHECK(c0_hi - c0_lo < 1e-8);
  CHECK(d0_hi - d0_lo < 1e-8);
}

TEST_CASE("coherence bands beat at the revival period") {
  // grid hits t1, t1 + tau/2, t1 + tau exactly: dJ = 2 phases advance
  // by 2 pi (2J + 3) over tau, dJ = 4 phases by 2 pi (2J + 5) over
  // tau / 2, so c2 is tau-periodic and c4 is tau/2-periodic.
  const auto& f = kick_fixture();
  const double tau = f.mol.revival_time();
  const double t1 = 5.0 * units::au_per_ps;
  const std::vector<double> grid2 = {t1, t1 + 0.5 * tau, t1 + tau};

  ThermalEnsemble ens2 = f.ens;
  propagate_ensemble(ens2.members, f.mol, f.pulse, grid2, 40);
  const CoherenceDecomposition co =
      coherence_decomposition(assemble_density(ens2.members, grid2, 40));

  CHECK(std::abs(co.c4[1] - co.c4[0]) < 1e-6);
  CHECK(std::abs(co.c4[2] - co.c4[0]) < 1e-6);
  CHECK(std::abs(co.c2[2] - co.c2[0]) < 1e-6);
  // c2 is genuinely oscillating, so the half period must not match
  CHECK(std::abs(co.c2[1] - co.c2[0]) > 1e-4);
}

TEST_CASE("coherence_splittings") {
  const MoleculeSpec mol = MoleculeSpec::from_io(0.07941759, 4.0, 0.5);
  const auto [s2, s4] = coherence_splittings(mol, 0);
  CHECK(s2 == 6.0 * mol.B);
  CHECK(s4 == 20.0 * mol.B);
  const auto [t2, t4] = coherence_splittings(mol, 3);
  CHECK(t2 == 18.0 * mol.B);
  CHECK(t4 == 44.0 * mol.B);
  CHECK_THROWS_AS(coherence_splittings(mol, -1), std::invalid_argument);
}

TEST_CASE("revival analysis finds the quarter structure") {
  const auto& f = kick_fixture();
  const RevivalReport rep = revival_analysis(f.series, f.mol, 0.0);
  const double tau = f.mol.revival_time();
  CHECK(rep.tau_rev == tau);

  REQUIRE(rep.features.size() == 4);
  for (int q = 0; q < 4; ++q) {
    CHECK(rep.features[q].quarter == q + 1);
    const double center = 0.25 * (q + 1) * tau;
    CHECK(rep.features[q].window_lo ==
          doctest::Approx(center - 0.05 * tau).epsilon(1e-12));
    CHECK(rep.features[q].window_hi ==
          doctest::Approx(center + 0.05 * tau).epsilon(1e-12));
  }

  // full revival: the alignment transient replays just after tau
  const RevivalFeature& full = rep.features[3];
  CHECK(std::abs(full.t_mean_max - tau) < 0.02 * tau);
  // quarter revivals: delta swings while the mean stays put
  CHECK(rep.features[0].delta_excursion > 0.03);
  CHECK(rep.features[0].mean_excursion < 0.02);
  CHECK(rep.features[2].delta_excursion > 0.03);

  CHECK(rep.baseline_mean > 1.0 / 3.0 + 0.05);
  CHECK(rep.baseline_mean < 0.55);
  CHECK(rep.baseline_delta > 0.30);
  CHECK(rep.baseline_delta < 0.37);
  CHECK(rep.global_peak_mean >= rep.baseline_mean);
  CHECK(rep.delta_at_global_peak < rep.baseline_delta);
}

TEST_CASE("dJ = 0 part of mean_cos2 sets the revival baseline") {
  // the baseline averages out the dJ = 2 beats, so it has to sit close
  // to the frozen dJ = 0 population term
  const auto& f = kick_fixture();
  const RevivalReport rep = revival_analysis(f.series, f.mol, 0.0);
  const auto [d0, d2] = cos2_partition(f.density);
  const double tau = f.mol.revival_time();
  double avg = 0.0;
  int count = 0;
  for (std::size_t ti = 0; ti < f.grid.size(); ++ti) {
    if (f.grid[ti] < 0.1 * tau || f.grid[ti] > tau) continue;
    avg += d0[ti];
    ++count;
  }
  avg /= double(count);
  CHECK(std::abs(rep.baseline_mean - avg) < 5e-3);
}

TEST_CASE("revival analysis needs a full revival of data") {
  const auto& f = kick_fixture();
  ObservableSeries cut = f.series;
  const double limit = 0.9 * f.mol.revival_time();
  std::size_t keep = 0;
  while (keep < cut.t.size() && cut.t[keep] <= limit) ++keep;
  cut.t.resize(keep);
  cut.mean_cos2.resize(keep);
  cut.mean_cos4.resize(keep);
  cut.delta_cos2.resize(keep);
  CHECK_THROWS_AS(revival_analysis(cut, f.mol, 0.0), InsufficientSpan);
}

TEST_CASE("baseline comparison flags the quantum-classical split") {
  const auto& f = kick_fixture();
  const TrajectoryEnsemble init = sample_initial(f.mol, 10000, 7);
  const ClassicalRunResult cl = integrate(init, f.mol, f.pulse, f.grid);
  const BaselineComparison cmp =
      baseline_comparison(f.series, cl.series, f.mol, 0.0);

  CHECK(cmp.tau_rev == f.mol.revival_time());
  CHECK(cmp.classical_flat_after_quarter);
  CHECK(cmp.quantum_structured_after_quarter);
  CHECK(cmp.timeavg_mean_matches_baseline);
  CHECK(cmp.timeavg_delta_below_baseline);
  CHECK(cmp.classical_late_variation < 0.02);
  CHECK(cmp.quantum_late_variation > 0.02);
  CHECK(std::abs(cmp.quantum_baseline_mean - cmp.classical_plateau_mean) < 0.02);
  CHECK(cmp.quantum_timeavg_delta < cmp.quantum_baseline_delta);

  // the published agreement window: both curves track through the kick
  CHECK(cmp.early_max_diff_mean < 0.08);

  const RevivalReport rep = revival_analysis(f.series, f.mol, 0.0);
  CHECK(cmp.quantum_baseline_mean ==
        doctest::Approx(rep.baseline_mean).epsilon(1e-9));
}

TEST_CASE("baseline comparison insists on a shared grid") {
  const auto& f = kick_fixture();
  ObservableSeries other = f.series;
  other.t.pop_back();
  other.mean_cos2.pop_back();
  other.mean_cos4.pop_back();
  other.delta_cos2.pop_back();
  CHECK_THROWS_AS(baseline_comparison(f.series, other, f.mol, 0.0),
                  std::invalid_argument);
  other = f.series;
  other.t[0] += 1.0;
  CHECK_THROWS_AS(baseline_comparison(f.series, other, f.mol, 0.0),
                  std::invalid_argument);
}

TEST_SUITE_END();
