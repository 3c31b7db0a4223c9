#include <benchmark/benchmark.h>

#include "curecg/diagnostics.hpp"
#include "curecg/initializer.hpp"
#include "curecg/likelihood.hpp"
#include "curecg/optimizer.hpp"
#include "curecg/simulator.hpp"

using namespace curecg;

namespace {

Dataset sample(std::int64_t n) {
  BinaryDesign design;
  design.n1 = static_cast<std::size_t>(n * 3 / 5);
  design.n2 = static_cast<std::size_t>(n - n * 3 / 5);
  return generate_binary(design, SimSeed{1, 0});
}

void BM_LogLikelihood(benchmark::State& state) {
  const Dataset data = sample(state.range(0));
  const ParamVector theta = BinaryDesign{}.truth();
  for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(theta, data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogLikelihood)->Arg(300)->Arg(3000);

void BM_Gradient(benchmark::State& state) {
  const Dataset data = sample(state.range(0));
  const ParamVector theta = BinaryDesign{}.truth();
  for (auto _ : state) benchmark::DoNotOptimize(gradient(theta, data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Gradient)->Arg(300)->Arg(3000);

void BM_Initialize(benchmark::State& state) {
  const Dataset data = sample(300);
  for (auto _ : state) benchmark::DoNotOptimize(initialize(data, ModelVariant::free_alpha()));
}
BENCHMARK(BM_Initialize);

void BM_Fit(benchmark::State& state) {
  const Dataset data = sample(300);
  const auto init = initialize(data, ModelVariant::free_alpha());
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_model(data, init.theta0, ModelVariant::free_alpha()));
  }
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

void BM_Residuals(benchmark::State& state) {
  const Dataset data = sample(1000);
  const ParamVector theta = BinaryDesign{}.truth();
  for (auto _ : state) {
    const auto rs = quantile_residuals(theta, data, 5, SimSeed{2, 0});
    benchmark::DoNotOptimize(ks_normality_test(rs.residuals));
  }
}
BENCHMARK(BM_Residuals);

}  // namespace
BENCHMARK_MAIN();
