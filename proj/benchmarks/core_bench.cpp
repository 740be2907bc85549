#include <benchmark/benchmark.h>

#include "css/baselines.hpp"
#include "css/css.hpp"
#include "css/multibin.hpp"
#include "css/worlds.hpp"

namespace {

using namespace css;

CalibrationSet sampled_calibration(std::size_t n) {
  NoisyClassifierWorld world;
  world.noise_ratio = 0.2;
  RandomSource rng = derive_stream(5, 0);
  return sample_calibration(world, n, rng);
}

void BM_css_threshold(benchmark::State& state) {
  const auto cal = sampled_calibration(static_cast<std::size_t>(state.range(0)));
  const GuaranteeConfig cfg{5.0, 100.0, 0.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(css_threshold(cal, cfg));
  }
}
BENCHMARK(BM_css_threshold)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_delta_curve(benchmark::State& state) {
  const auto cal = sampled_calibration(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(delta_curve(cal));
  }
}
BENCHMARK(BM_delta_curve)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_omniscient_rule(benchmark::State& state) {
  RandomSource rng = derive_stream(6, 0);
  std::vector<double> probs(static_cast<std::size_t>(state.range(0)));
  for (auto& p : probs) p = rng.next_uniform();
  double total = 0.0;
  for (double p : probs) total += p;
  const double k = 0.25 * total;
  for (auto _ : state) {
    benchmark::DoNotOptimize(omniscient_rule(probs, k));
  }
}
BENCHMARK(BM_omniscient_rule)->Arg(100)->Arg(10000);

void BM_umb_pipeline(benchmark::State& state) {
  const auto cal = sampled_calibration(10000);
  const GuaranteeConfig cfg{5.0, 100.0, 0.1};
  const auto bins = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const auto model = bin_deltas(cal, umb_edges(cal, bins));
    benchmark::DoNotOptimize(multibin_policy(model, cfg));
  }
}
BENCHMARK(BM_umb_pipeline)->Arg(2)->Arg(10);

void BM_platt_fit(benchmark::State& state) {
  const auto cal = sampled_calibration(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(platt_fit(cal));
  }
}
BENCHMARK(BM_platt_fit)->Arg(1000)->Arg(10000);

void BM_isotonic_fit(benchmark::State& state) {
  const auto cal = sampled_calibration(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(isotonic_fit(cal));
  }
}
BENCHMARK(BM_isotonic_fit)->Arg(1000)->Arg(10000);

void BM_sample_pool(benchmark::State& state) {
  NoisyClassifierWorld world;
  world.noise_ratio = 0.5;
  RandomSource rng = derive_stream(7, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_pool(world, 100, rng));
  }
}
BENCHMARK(BM_sample_pool);

}  // namespace

BENCHMARK_MAIN();
