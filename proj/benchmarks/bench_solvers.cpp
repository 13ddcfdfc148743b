#include <benchmark/benchmark.h>

#include "degenwave/discretization.hpp"
#include "degenwave/hum_control.hpp"
#include "degenwave/observability.hpp"
#include "degenwave/spectral.hpp"
#include "degenwave/wave_solver.hpp"

namespace dw = degenwave;

namespace {

struct Problem {
  explicit Problem(int n) : op(dw::assemble_operator(dw::Grid(2, n, 1.0), params())), basis(dw::compute_filtered_eigs(op, 0.5)) {
    phi0 = dw::smooth_bump(op.grid, {}, 0.5);
    phi1 = Eigen::VectorXd::Zero(op.size());
  }
  static dw::WeightParams params() {
    dw::WeightParams p;
    p.epsilon = 0.1;
    return p;
  }
  dw::OperatorMatrix op;
  dw::EigenBasis basis;
  Eigen::VectorXd phi0, phi1;
};

}  // namespace

static void BM_Leapfrog(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  const double dt = 0.5 * dw::cfl_limit(p.op);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dw::solve_leapfrog(p.op, p.phi0, p.phi1, dw::Forcing::zero(), 8.0, dt, {false}));
  }
  state.counters["steps"] = dw::step_count(8.0, dt);
}
BENCHMARK(BM_Leapfrog)->Arg(31)->Arg(61)->Unit(benchmark::kMillisecond);

static void BM_Spectral(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dw::solve_spectral(p.op, p.basis, p.phi0, p.phi1, dw::Forcing::zero(), 8.0, 2000, {false}));
  }
  state.counters["modes"] = static_cast<double>(p.basis.size());
}
BENCHMARK(BM_Spectral)->Arg(31)->Arg(61)->Unit(benchmark::kMillisecond);

static void BM_HumApply(benchmark::State& state) {
  const Problem p(static_cast<int>(state.range(0)));
  dw::HUMProblem hum;
  hum.op = &p.op;
  hum.basis = &p.basis;
  hum.phi0 = p.phi0;
  hum.phi1 = p.phi1;
  const Eigen::VectorXd sigma = Eigen::VectorXd::Ones(2 * p.basis.size());
  for (auto _ : state) benchmark::DoNotOptimize(dw::hum_apply(hum, sigma));
}
BENCHMARK(BM_HumApply)->Arg(31)->Arg(61)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
