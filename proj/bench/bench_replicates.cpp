// Serial reference loop against the OpenMP replicate map on the risk
// sequential-estimator kernel.

#include <benchmark/benchmark.h>

#include "optreg/estimators.hpp"
#include "optreg/mc_harness.hpp"
#include "optreg/parallel.hpp"
#include "optreg/simulators.hpp"

namespace {

using namespace optreg;

ScenarioConfig risk() {
  ScenarioConfig c;
  c.kind = ScenarioKind::risk;
  c.premium = 2.0;
  c.horizon = 10.1;
  c.step = 1e-3;
  c.noise = NoiseSpec{1.0, 0.5, 1.0, 0.3, 1.0};
  c.seed = 42;
  return c;
}

double replicate(const ScenarioConfig& base, std::size_t i) {
  ScenarioConfig c = base;
  c.seed = replicate_seed(base.seed, 0, i);
  const SimulatedModel m = build_scenario(c);
  return sequential_ls(m.X(), m.f(), m.a(), 10.0).theta_hat;
}

void BM_Serial(benchmark::State& state) {
  const ScenarioConfig c = risk();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = map_replicates_serial<double>(n, [&](std::size_t i) { return replicate(c, i); });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
  const ScenarioConfig c = risk();
  const auto n = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto out = map_replicates_parallel<double>(n, threads,
                                               [&](std::size_t i) { return replicate(c, i); });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)
    ->Args({64, 1})
    ->Args({64, 2})
    ->Args({64, 4})
    ->Args({64, 8})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
