#include "dofoc/dofde_solvers.hpp"
#include "dofoc/fractional_operators.hpp"
#include "dofoc/pmp_engine.hpp"
#include "dofoc/special_functions.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace dofoc;

namespace {

Trajectory sine(const TimeGrid& grid) {
  return Trajectory::sample(grid, 1, [](double t) { return Vector::Constant(1, std::sin(t)); });
}

void BM_DistributedCaputo(benchmark::State& state) {
  const TimeGrid grid(0.0, 1.0, static_cast<int>(state.range(0)));
  const Trajectory x = sine(grid);
  const OrderDistribution d = build_distribution(polynomial_weight({0.0, 1.0 / 3.0}), 20);
  for (auto _ : state) benchmark::DoNotOptimize(distributed_caputo_left(x, d));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistributedCaputo)->Arg(500)->Arg(1000)->Arg(2000)->Arg(4000)->Complexity(benchmark::oNSquared);

void BM_DistributedIntegral(benchmark::State& state) {
  const TimeGrid grid(0.0, 1.0, static_cast<int>(state.range(0)));
  const Trajectory x = sine(grid);
  const OrderDistribution d = build_distribution([](double) { return 1.0; }, 20);
  for (auto _ : state) benchmark::DoNotOptimize(distributed_integral_right(x, d));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistributedIntegral)->Arg(500)->Arg(1000)->Arg(2000)->Arg(4000)->Complexity(benchmark::oNSquared);

void BM_ForwardSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TimeGrid grid(1.0, 5.0, n);
  const Trajectory u = Trajectory::sample(grid, 1, [](double t) { return Vector::Constant(1, t < 4.68 ? 2.0 : 0.0); });
  const ForwardProblem p{[](double, const Vector& x, const Vector& v) { return Vector(v.cwiseProduct(x)); }, u,
                         Vector::Constant(1, 1.0), build_distribution(polynomial_weight({0.0, 1.0 / 3.0}), 20),
                         grid};
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(solve_forward(p, cfg));
  state.SetComplexityN(n);
}
BENCHMARK(BM_ForwardSolve)->Arg(500)->Arg(1000)->Arg(2000)->Arg(4000)->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);

void BM_MittagLefflerSeries(benchmark::State& state) {
  double z = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::mittag_leffler({0.7, 1.0}, z));
    z = z < 3.0 ? z + 0.01 : -3.0;
  }
}
BENCHMARK(BM_MittagLefflerSeries);

void BM_MittagLefflerIntegral(benchmark::State& state) {
  double z = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::mittag_leffler({0.3, 1.0}, z));
    z = z > -20.0 ? z - 0.05 : -3.0;
  }
}
BENCHMARK(BM_MittagLefflerIntegral);

}  // namespace

BENCHMARK_MAIN();
