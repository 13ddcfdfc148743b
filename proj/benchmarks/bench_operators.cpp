#include <benchmark/benchmark.h>

#include "degenwave/discretization.hpp"
#include "degenwave/spectral.hpp"

namespace dw = degenwave;

namespace {

dw::WeightParams reference() {
  dw::WeightParams p;
  p.alpha = 1.0;
  p.epsilon = 0.1;
  return p;
}

}  // namespace

static void BM_Assemble(benchmark::State& state) {
  const dw::Grid grid(2, static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(dw::assemble_operator(grid, reference()));
  state.SetComplexityN(grid.interior_count());
}
BENCHMARK(BM_Assemble)->Arg(31)->Arg(61)->Arg(121)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_FilteredEigs(benchmark::State& state) {
  const auto op = dw::assemble_operator(dw::Grid(2, static_cast<int>(state.range(0)), 1.0), reference());
  dw::EigenOptions opt;
  opt.method = dw::EigenMethod::Lanczos;
  for (auto _ : state) benchmark::DoNotOptimize(dw::compute_filtered_eigs(op, 0.5, opt));
}
BENCHMARK(BM_FilteredEigs)->Arg(31)->Arg(61)->Unit(benchmark::kMillisecond);

static void BM_DenseEigs(benchmark::State& state) {
  const auto op = dw::assemble_operator(dw::Grid(2, static_cast<int>(state.range(0)), 1.0), reference());
  dw::EigenOptions opt;
  opt.method = dw::EigenMethod::Dense;
  for (auto _ : state) benchmark::DoNotOptimize(dw::compute_eigs(op, 50, opt));
}
BENCHMARK(BM_DenseEigs)->Arg(21)->Arg(31)->Unit(benchmark::kMillisecond);
