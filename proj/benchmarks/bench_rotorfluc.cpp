#include <cstddef>
#include <vector>

#include <benchmark/benchmark.h>

#include "rotorfluc/classical.hpp"
#include "rotorfluc/constants.hpp"
#include "rotorfluc/observables.hpp"
#include "rotorfluc/quantum.hpp"

namespace {

using namespace rotorfluc;

const MoleculeSpec kMol = MoleculeSpec::from_io(0.07941759, 4.0, 0.5);
const PulseSpec kKick = PulseSpec::from_io(2.0e12, 0.5, 0.0);

std::vector<double> make_grid(double start_ps, double end_ps, std::size_t n) {
  std::vector<double> g(n);
  const double h = (end_ps - start_ps) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = (start_ps + h * static_cast<double>(i)) * units::au_per_ps;
  return g;
}

const std::vector<double>& short_grid() {
  static const std::vector<double> g = make_grid(-2.0, 8.0, 64);
  return g;
}

// Thermal ensemble propagated once; the analysis benchmarks reuse it.
struct PropagatedFixture {
  std::vector<EnsembleMember> members;
  int J_max = 40;
};

const PropagatedFixture& kicked_ensemble() {
  static const PropagatedFixture fx = [] {
    PropagatedFixture f;
    f.members = thermal_members(kMol, 0.999).members;
    propagate_ensemble(f.members, kMol, kKick, short_grid(), f.J_max);
    return f;
  }();
  return fx;
}

void BM_PropagateKick(benchmark::State& state) {
  const int J_max = static_cast<int>(state.range(0));
  const RotorLevel initial{0, 0};
  for (auto _ : state) {
    auto [traj, stats] = propagate(initial, kMol, kKick, short_grid(), J_max);
    benchmark::DoNotOptimize(traj);
    benchmark::DoNotOptimize(stats);
  }
  state.counters["steps"] = static_cast<double>(
      propagate(initial, kMol, kKick, short_grid(), J_max).second.steps);
}
BENCHMARK(BM_PropagateKick)->Arg(32)->Arg(48)->Arg(64);

void BM_AssembleDensity(benchmark::State& state) {
  const PropagatedFixture& fx = kicked_ensemble();
  for (auto _ : state) {
    DensityBlockSeries d = assemble_density(fx.members, short_grid(), fx.J_max);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_AssembleDensity);

void BM_QuantumObservables(benchmark::State& state) {
  const PropagatedFixture& fx = kicked_ensemble();
  const DensityBlockSeries d =
      assemble_density(fx.members, short_grid(), fx.J_max);
  for (auto _ : state) {
    ObservableSeries s = quantum_observables(d);
    CoherenceDecomposition c = coherence_decomposition(d);
    benchmark::DoNotOptimize(s);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_QuantumObservables);

void BM_AngularDistribution(benchmark::State& state) {
  const PropagatedFixture& fx = kicked_ensemble();
  const int bins = static_cast<int>(state.range(0));
  for (auto _ : state) {
    AngularDistributionSeries d =
        quantum_angular_distribution(fx.members, short_grid(), bins);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_AngularDistribution)->Arg(64)->Arg(256);

void BM_SampleInitial(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    TrajectoryEnsemble e = sample_initial(kMol, n, 12345);
    benchmark::DoNotOptimize(e);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SampleInitial)->Arg(10000)->Arg(100000);

void BM_ClassicalIntegrate(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const TrajectoryEnsemble ensemble = sample_initial(kMol, n, 12345);
  ClassicalOptions opts;
  opts.theta_bins = 64;
  for (auto _ : state) {
    ClassicalRunResult r =
        integrate(ensemble, kMol, kKick, short_grid(), opts);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ClassicalIntegrate)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
