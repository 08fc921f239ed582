#include <benchmark/benchmark.h>

#include <vector>

#include "lpp/barrier.hpp"
#include "lpp/batch.hpp"
#include "lpp/field.hpp"
#include "lpp/passage.hpp"
#include "lpp/surface.hpp"

using namespace lpp;

namespace {

void BM_WeightScalar(benchmark::State& state) {
  const WeightField f = WeightField::unbounded(FieldKey{1, 0});
  Coord x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.weight_unchecked(x, x + 1));
    ++x;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WeightScalar);

void BM_FillDiagonal(benchmark::State& state) {
  const WeightField f = WeightField::unbounded(FieldKey{1, 0});
  const Coord n = static_cast<Coord>(state.range(0));
  std::vector<double> out(static_cast<std::size_t>(n));
  Coord y = n;
  for (auto _ : state) {
    f.fill_diagonal(0, y++, 1, n, out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FillDiagonal)->Arg(64)->Arg(4096);

void BM_PassageTime(benchmark::State& state) {
  const Coord n = static_cast<Coord>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const WeightField f = WeightField::unbounded(FieldKey{2, rep++});
    benchmark::DoNotOptimize(passage_time(f, {0, 0}, {n, n}));
  }
  state.SetItemsProcessed(state.iterations() * (n + 1) * (n + 1));
}
BENCHMARK(BM_PassageTime)->Arg(256)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_BackwardTrace(benchmark::State& state) {
  const Coord n = static_cast<Coord>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const WeightField f = WeightField::unbounded(FieldKey{3, rep++});
    const auto s = PassageSurface::backward(f, {n, n}, Rect{0, n, 0, n});
    benchmark::DoNotOptimize(s.trace({0, 0}).weight);
  }
  state.SetItemsProcessed(state.iterations() * (n + 1) * (n + 1));
}
// 8192 is above the dense budget and exercises checkpointing.
BENCHMARK(BM_BackwardTrace)->Arg(1024)->Arg(4096)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_BatchSweep(benchmark::State& state) {
  const WeightField f = WeightField::unbounded(FieldKey{4, 0});
  ColumnSweep spec;
  spec.source_column = 0;
  spec.target_column = 512;
  spec.row_lo = 0;
  spec.row_hi = 1023;
  for (Coord r = 0; r < state.range(0); ++r) spec.source_rows.push_back(r * 4);
  double sink = 0;
  for (auto _ : state) {
    sweep_sources_to_column(f, spec, [&](std::size_t, const double* v) {
      sink += v[1023];
      return true;
    });
  }
  benchmark::DoNotOptimize(sink);
  state.SetItemsProcessed(state.iterations() * state.range(0) * 513 * 1024);
}
BENCHMARK(BM_BatchSweep)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_BarrierTrial(benchmark::State& state) {
  BarrierParams p;
  p.z = static_cast<Coord>(state.range(0));
  const BarrierSpec spec = build_spec(p);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_coalescence_trial(WeightField::unbounded(FieldKey{5, rep++}), spec).f_meet);
  }
}
BENCHMARK(BM_BarrierTrial)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
