#include <benchmark/benchmark.h>

#include <vector>

#include "spinsq/sm_curves.hpp"
#include "spinsq/split_model.hpp"
#include "spinsq/witnesses.hpp"

namespace {

void GroundState(benchmark::State& state) {
  const spinsq::SpinLength spin(static_cast<int>(state.range(0)));
  const auto op = spinsq::build_hamiltonian(0.1, spin);
  for (auto _ : state) {
    auto gs = spinsq::ground_state(op);
    benchmark::DoNotOptimize(gs.energy);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(GroundState)->RangeMultiplier(4)->Range(8, 2048)->Complexity();

void BuildFsTable(benchmark::State& state) {
  const spinsq::SpinLength spin(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto table = spinsq::build_fs_table(spin, 64);
    benchmark::DoNotOptimize(table.samples.data());
  }
}
BENCHMARK(BuildFsTable)->Arg(4)->Arg(20)->Arg(100);

void FsEval(benchmark::State& state) {
  const spinsq::SpinLength spin(20);
  const auto table = spinsq::build_fs_table(spin);
  double x = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(spinsq::fs_eval(table, x));
    x += 0.009;
    if (x > 0.95) x = 0.05;
  }
}
BENCHMARK(FsEval);

void BetaMinEnumerate(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const auto g = spinsq::g_star(modes);
  const auto h = spinsq::h_star(modes);
  for (auto _ : state) {
    auto res = spinsq::beta_min_enumerate(modes, 2, g, h);
    benchmark::DoNotOptimize(res.value);
  }
}
BENCHMARK(BetaMinEnumerate)->DenseRange(6, 12, 2);

void DepthDetectTight(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const spinsq::CollectiveMoments m{n, 0.13 * 0.25 * n, 0.5 * n / 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(spinsq::depth_detect(m, spinsq::DepthMethod::tight));
  }
}
BENCHMARK(DepthDetectTight)->Arg(100)->Arg(10000)->Arg(1000000);

void OccupationSampler(benchmark::State& state) {
  const auto cfg = spinsq::SplitConfig::symmetric(3);
  for (auto _ : state) {
    auto stats = spinsq::sample_mode_occupation(8, cfg, state.range(0), 42);
    benchmark::DoNotOptimize(stats.mode_mean.data());
  }
}
BENCHMARK(OccupationSampler)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
