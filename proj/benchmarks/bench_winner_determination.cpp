#include <benchmark/benchmark.h>

#include <random>

#include "rae/env.hpp"

namespace {

rae::Environment random_ca(int n, int m, std::mt19937_64& rng) {
  std::vector<std::vector<int>> demands(n);
  for (auto& d : demands) {
    for (int it = 0; it < m; ++it)
      if (rng() % 3 == 0) d.push_back(it);
    if (d.empty()) d.push_back(static_cast<int>(rng() % m));
  }
  return rae::Environment::single_minded_ca(m, demands);
}

void BM_ca_branch_and_bound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  rae::Environment env = random_ca(n, 8, rng);
  std::uniform_real_distribution<double> u(0, 1);
  rae::Weights w(n);
  for (auto& x : w) x = u(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rae::max_weight_feasible(env, w).total);
  }
}
BENCHMARK(BM_ca_branch_and_bound)->Arg(8)->Arg(16)->Arg(24);

void BM_matroid_greedy(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(11);
  std::vector<std::vector<int>> demand(n);
  for (auto& d : demand)
    for (int it = 0; it < n; ++it)
      if (rng() % 2) d.push_back(it);
  rae::Environment env = rae::Environment::transversal_matroid(n, demand);
  std::uniform_real_distribution<double> u(0, 1);
  rae::Weights w(n);
  for (auto& x : w) x = u(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rae::max_weight_feasible(env, w).total);
  }
}
BENCHMARK(BM_matroid_greedy)->Arg(8)->Arg(16)->Arg(32);

}  // namespace
