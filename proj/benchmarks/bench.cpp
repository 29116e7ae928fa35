#include <benchmark/benchmark.h>

#include "npmle/certifier.hpp"
#include "npmle/newton.hpp"
#include "npmle/pipeline.hpp"
#include "npmle/rng.hpp"

using namespace npmle;

namespace {

Dataset bench_data(int n) {
  SplitMix64 rng(12345);
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(rng.uniform(-2, 2));
  return make_dataset(std::move(xs), 2.0);
}

DiscreteMixture bench_mixture() {
  return make_mixture({0.3, 0.45, 0.25}, {-1.4, 0.1, 1.5});
}

void BM_DerivativeEval(benchmark::State& state) {
  Dataset X = bench_data(static_cast<int>(state.range(0)));
  DiscreteMixture m = bench_mixture();
  DEvaluator D(m, X);
  double y = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(D.derivative(y, 2));
    y = -y;
  }
}
BENCHMARK(BM_DerivativeEval)->Arg(16)->Arg(128)->Arg(1024);

void BM_FrankWolfe(benchmark::State& state) {
  Dataset X = bench_data(32);
  Grid g = build_grid(2.0, 0.02);
  for (auto _ : state)
    benchmark::DoNotOptimize(frank_wolfe(X, g, state.range(0)));
}
BENCHMARK(BM_FrankWolfe)->Arg(100)->Arg(1000);

void BM_GammaJacobian(benchmark::State& state) {
  Dataset X = bench_data(static_cast<int>(state.range(0)));
  DiscreteMixture m = bench_mixture();
  for (auto _ : state) benchmark::DoNotOptimize(gamma_jacobian(m, X));
}
BENCHMARK(BM_GammaJacobian)->Arg(64)->Arg(512);

void BM_CertifyGlobalMax(benchmark::State& state) {
  Dataset X = bench_data(24);
  DiscreteMixture m = optimize_weights({-1.5, -0.2, 1.1}, X, 1e-10);
  for (auto _ : state)
    benchmark::DoNotOptimize(certify_global_max(m, X, 1e-10));
}
BENCHMARK(BM_CertifyGlobalMax);

void BM_SolveTwoPoint(benchmark::State& state) {
  Dataset X = make_dataset({-2.0, 2.0});
  for (auto _ : state) benchmark::DoNotOptimize(solve_npmle(X));
}
BENCHMARK(BM_SolveTwoPoint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
