#include <benchmark/benchmark.h>

#include "pcqp/ipm.hpp"
#include "pcqp/linalg.hpp"
#include "pcqp/problem.hpp"

namespace {

pcqp::BoxQP instance(std::size_t n) {
  pcqp::GeneratorConfig cfg;
  cfg.n = n;
  cfg.seed = 1;
  return pcqp::random_boxqp(cfg);
}

void BM_Solve(benchmark::State& state) {
  const pcqp::BoxQP p = instance(static_cast<std::size_t>(state.range(0)));
  std::size_t iterations = 0;
  for (auto _ : state) {
    const pcqp::SolveResult r = pcqp::solve(p, 1e-6);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.z.data());
  }
  state.counters["ipm_iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_Solve)->Arg(10)->Arg(40)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Cholesky(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const pcqp::SymMatrix a = instance(n).H();
  const pcqp::Vector b(n, 1.0);
  for (auto _ : state) {
    const pcqp::Vector x = pcqp::spd_solve(a, b);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Cholesky)->RangeMultiplier(2)->Range(16, 512)->Complexity(benchmark::oNCubed);

void BM_Initialize(benchmark::State& state) {
  const pcqp::BoxQP p = instance(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto start = pcqp::initialize(p);
    benchmark::DoNotOptimize(start.second.gamma.data());
  }
}
BENCHMARK(BM_Initialize)->Arg(40)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
