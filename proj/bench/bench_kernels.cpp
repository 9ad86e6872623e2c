// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "gm/analytics.hpp"
#include "gm/monte_carlo.hpp"
#include "gm/verification.hpp"

namespace {

gm::SimConfig sim_config(long trials) {
  gm::SimConfig c;
  c.params = gm::ModelParams(0.5, 0.2);
  c.horizon = 500;
  c.trials = trials;
  c.seed = 1;
  return c;
}

void BM_SimulateSerial(benchmark::State& state) {
  const gm::SimConfig c = sim_config(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gm::serial::simulate(c));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * c.horizon);
}

void BM_SimulateParallel(benchmark::State& state) {
  const gm::SimConfig c = sim_config(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gm::simulate(c));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * c.horizon);
}

gm::ScanGrid scan_grid(long points) {
  gm::ScanGrid g;
  g.q_points = points;
  g.theta_points = points;
  return g;
}

void BM_ScanSerial(benchmark::State& state) {
  const gm::ScanGrid g = scan_grid(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gm::serial::scan_entropic_inequality(g));
  }
}

void BM_ScanParallel(benchmark::State& state) {
  const gm::ScanGrid g = scan_grid(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gm::scan_entropic_inequality(g));
  }
}

void BM_ExactSeriesSerial(benchmark::State& state) {
  const gm::ModelParams p(0.5, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gm::serial::exact_series(state.range(0), p));
  }
}

void BM_ExactSeriesParallel(benchmark::State& state) {
  const gm::ModelParams p(0.5, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gm::exact_series(state.range(0), p));
  }
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanSerial)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactSeriesSerial)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactSeriesParallel)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
