#include <benchmark/benchmark.h>

#include "stablewalk/capacity.hpp"
#include "stablewalk/green.hpp"
#include "stablewalk/site_set.hpp"
#include "stablewalk/step_law.hpp"
#include "stablewalk/walker.hpp"

using namespace stablewalk;

static void BM_StepSample(benchmark::State& state) {
  const StepLaw law = StepLaw::axial_power_law(static_cast<int>(state.range(0)), 0.7, 0.25);
  StreamRng rng(StreamId{1, 0, 0});
  LatticePoint pos(law.dim());
  for (auto _ : state) {
    law.step(pos, rng);
    benchmark::DoNotOptimize(pos);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepSample)->Arg(2)->Arg(6);

static void BM_SiteSetInsert(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  StreamRng rng(StreamId{2, 0, 0});
  std::vector<LatticePoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    pts.push_back(LatticePoint{static_cast<std::int64_t>(rng.below(1 << 20)), static_cast<std::int64_t>(rng.below(1 << 20))});
  }
  for (auto _ : state) {
    SiteSet s(2);
    for (std::size_t i = 0; i < n; ++i) s.insert(pts[i], static_cast<std::int64_t>(i));
    benchmark::DoNotOptimize(s.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SiteSetInsert)->Arg(1 << 12)->Arg(1 << 16);

static void BM_RangeWalk(benchmark::State& state) {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const RangeState r = simulate_path(law, state.range(0), walk_stream(3, rep++));
    benchmark::DoNotOptimize(r.cardinality());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RangeWalk)->Arg(4096);

static void BM_GreenBuild(benchmark::State& state) {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  for (auto _ : state) {
    QuadratureGreen q(law, state.range(0));
    benchmark::DoNotOptimize(q.tail_bound());
  }
}
BENCHMARK(BM_GreenBuild)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_GreenEvaluate(benchmark::State& state) {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const QuadratureGreen q(law, 64);
  std::int64_t r = 0;
  for (auto _ : state) {
    // Distinct displacements so that the cache does not serve every call.
    benchmark::DoNotOptimize(q.evaluate(LatticePoint{r % 65, (r / 65) % 65}));
    ++r;
  }
}
BENCHMARK(BM_GreenEvaluate);

static void BM_EquilibriumSolve(benchmark::State& state) {
  const StepLaw law = StepLaw::lazy_simple(6, 0.5);
  const QuadratureGreen q(law, 64);
  const RangeState p = simulate_path(law, state.range(0), 5);
  const auto sites = p.visited().sorted_sites();
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium_capacity(sites, q).value);
  state.counters["sites"] = static_cast<double>(sites.size());
}
BENCHMARK(BM_EquilibriumSolve)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

static void BM_CapacityProcess(benchmark::State& state) {
  const StepLaw law = StepLaw::axial_power_law(2, 0.7, 0.25);
  const auto grid = TimeGrid::from_decimals({0.0, 0.25, 0.5, 0.75, 1.0});
  CapacityProcessConfig cfg;
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(capacity_process(law, state.range(0), grid, cfg, 7, rep++));
}
BENCHMARK(BM_CapacityProcess)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
