#include <benchmark/benchmark.h>

#include <random>

#include "rae/step_function.hpp"

namespace {

std::vector<std::pair<double, rae::StepFunction>> random_parts(int count,
                                                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::pair<double, rae::StepFunction>> parts;
  for (int k = 0; k < count; ++k) {
    double b = u(rng);
    parts.emplace_back(1.0 / count,
                       rae::StepFunction::from_breakpoints({{b, u(rng)}, {b + 1.0, 1.0}}));
  }
  return parts;
}

void BM_average_sweep(benchmark::State& state) {
  std::mt19937_64 rng(3);
  auto parts = random_parts(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rae::StepFunction::average(parts).sup_level());
  }
}
BENCHMARK(BM_average_sweep)->Arg(100)->Arg(1000)->Arg(10000);

void BM_threshold_surplus(benchmark::State& state) {
  std::mt19937_64 rng(5);
  rae::StepFunction sf = rae::StepFunction::average(random_parts(static_cast<int>(state.range(0)), rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rae::threshold_surplus(sf, 0.9, 0.25));
  }
}
BENCHMARK(BM_threshold_surplus)->Arg(100)->Arg(10000);

}  // namespace
