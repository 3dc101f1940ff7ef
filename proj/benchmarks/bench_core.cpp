#include <benchmark/benchmark.h>

#include "adiascat/adiabatic.hpp"
#include "adiascat/numerics.hpp"
#include "adiascat/soluble.hpp"

using namespace adiascat;

namespace {

Schedule tanh_schedule() { return Schedule(Schedule::Kind::tanh, 1.0, 0.0); }

}  // namespace

static void BM_CoherentState(benchmark::State& state) {
  const Grid g(-40.0, 40.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(coherent_state(CoherentLabel(0.5, 1.0, 0.5), 0, 2, g));
}
BENCHMARK(BM_CoherentState)->RangeMultiplier(2)->Range(1024, 8192);

static void BM_OrderedExponential(benchmark::State& state) {
  const MatrixPotential pot = MatrixPotential::two_channel_fixture();
  const auto path = [&](double u) -> Matrix { return cplx(0.0, -1.0) * pot.at(u); };
  const auto order = state.range(1) == 4 ? numerics::MagnusOrder::fourth : numerics::MagnusOrder::second;
  for (auto _ : state)
    benchmark::DoNotOptimize(numerics::ordered_exponential(path, -8.0, 8.0, static_cast<int>(state.range(0)), order));
}
BENCHMARK(BM_OrderedExponential)->Args({1000, 2})->Args({1000, 4})->Args({10000, 2});

static void BM_FreeEvolve(benchmark::State& state) {
  const Grid g(-40.0, 40.0, 4096);
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 2, g);
  const double t = state.range(0) == 0 ? 64 * g.dx() : 0.3 * g.dx();  // lattice vs spectral
  for (auto _ : state) benchmark::DoNotOptimize(free_evolve(psi, t));
}
BENCHMARK(BM_FreeEvolve)->Arg(0)->Arg(1);

static void BM_PropagateMatrix(benchmark::State& state) {
  const Grid g(-40.0, 40.0, 4096);
  const ScatterModel m(MatrixPotential::two_channel_fixture(), tanh_schedule(), 0.1);
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 2, g);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(m, psi, -5.0, 5.0));
}
BENCHMARK(BM_PropagateMatrix)->Unit(benchmark::kMillisecond);

static void BM_PropagateRankOne(benchmark::State& state) {
  const Grid g(-40.0, 40.0, 4096);
  const ScatterModel m(RankOneCoupling{2.0, RankOneCoupling::cross_channel(2)}, tanh_schedule(), 2, 0.1);
  const StateVector psi = coherent_state(CoherentLabel(0.0, 1.0, 0.5), 0, 2, g);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(m, psi, -2.0, 2.0));
}
BENCHMARK(BM_PropagateRankOne)->Unit(benchmark::kMillisecond);

static void BM_OnShellRankOne(benchmark::State& state) {
  const ScatterModel m(RankOneCoupling{2.0, RankOneCoupling::cross_channel(2)}, Schedule::constant(0.5), 2, 0.1);
  double E = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(on_shell_S(m, 0.0, E));
    E = E > 3.0 ? -3.0 : E + 0.01;
  }
}
BENCHMARK(BM_OnShellRankOne);

static void BM_SolubleGaugePhase(benchmark::State& state) {
  const Grid g(-40.0, 40.0, 4096);
  const SolubleModel m = SolubleModel::default_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(soluble::gauge_phase(m, 0.3, g));
}
BENCHMARK(BM_SolubleGaugePhase)->Unit(benchmark::kMillisecond);

static void BM_AdiabaticTau(benchmark::State& state) {
  const Grid g(-40.0, 40.0, 4096);
  const ScatterModel m(MatrixPotential::two_channel_fixture(), tanh_schedule(), 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(adiabatic_tau(m, 0.3, 1.0, 0.5, 0, 1, 26.6, g));
}
BENCHMARK(BM_AdiabaticTau)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK_MAIN();
