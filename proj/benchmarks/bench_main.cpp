#include <benchmark/benchmark.h>

#include "ddw/analysis.hpp"
#include "ddw/arrow_field.hpp"
#include "ddw/dynamics.hpp"
#include "ddw/exceptional.hpp"
#include "ddw/web.hpp"

namespace {

void BM_ArrowAt(benchmark::State& state) {
  const ddw::ArrowField field(1, 1.0, 1.0);
  std::int64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(field.arrow_at({2 * (i % 1024), 2 * (i / 1024 % 1024)}, 0.7));
    ++i;
  }
}
BENCHMARK(BM_ArrowAt);

void BM_ForwardPath(benchmark::State& state) {
  const ddw::ArrowField field(2, 1.0, 1.0);
  const auto H = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(ddw::forward_path(field, {0, 0}, 0.5, H));
  state.SetItemsProcessed(state.iterations() * H);
}
BENCHMARK(BM_ForwardPath)->Arg(1000)->Arg(100000);

void BM_SSweep(benchmark::State& state) {
  const auto H = state.range(0);
  std::uint64_t seed = 0;
  std::int64_t breakpoints = 0;
  for (auto _ : state) {
    const ddw::ArrowField field(seed++, 1.0, 1.0);
    ddw::PathSweeper sweeper(field, {0, 0}, H, 0.0, 1.0);
    while (sweeper.advance()) ++breakpoints;
  }
  state.counters["breakpoints"] = benchmark::Counter(static_cast<double>(breakpoints), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_SSweep)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ScanDecideLast(benchmark::State& state) {
  const auto h = ddw::build_boxes(6.0, 1.0, 4);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ddw::scan_replicas(6.0, 1.0, 4, 1, seed++, 1, false, ddw::ScanMode::decide_last));
}
BENCHMARK(BM_ScanDecideLast)->Unit(benchmark::kMillisecond);

void BM_SatoSolve(benchmark::State& state) {
  const double K = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(ddw::sato_solve(K));
}
BENCHMARK(BM_SatoSolve)->Arg(1)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
