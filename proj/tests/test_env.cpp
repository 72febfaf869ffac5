#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rae/env.hpp"

using namespace rae;

namespace {

// Independent winner-determination oracle for CA: enumerate all subsets.
double ca_brute_force(int num_items, const std::vector<std::vector<int>>& demands,
                      const Weights& w, Allocation* best_alloc = nullptr) {
  const int n = static_cast<int>(demands.size());
  double best = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> used(num_items, 0);
    double total = 0.0;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      for (int it : demands[i])
        if (used[it]++) ok = false;
      total += w[i];
    }
    if (ok && total > best + 1e-12) {
      best = total;
      if (best_alloc) {
        best_alloc->assign(n, 0.0);
        for (int i = 0; i < n; ++i)
          if (mask >> i & 1) (*best_alloc)[i] = 1.0;
      }
    }
  }
  return best;
}

// Independent matchability oracle: recursive assignment without augmenting
// paths.
bool assignable(const std::vector<std::vector<int>>& demand, std::vector<int>& taken,
                const std::vector<int>& agents, std::size_t k) {
  if (k == agents.size()) return true;
  for (int it : demand[agents[k]]) {
    if (taken[it]) continue;
    taken[it] = 1;
    if (assignable(demand, taken, agents, k + 1)) return true;
    taken[it] = 0;
  }
  return false;
}

double matroid_brute_force(int num_items, const std::vector<std::vector<int>>& demand,
                           const Weights& w) {
  const int n = static_cast<int>(demand.size());
  double best = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> agents;
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) {
        agents.push_back(i);
        total += w[i];
      }
    std::vector<int> taken(num_items, 0);
    if (assignable(demand, taken, agents, 0)) best = std::max(best, total);
  }
  return best;
}

// Position oracle: all injective assignments of agents to positions.
double position_brute_force(const std::vector<double>& alpha, const Weights& w) {
  const int n = static_cast<int>(alpha.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (int j = 0; j < n; ++j) total += alpha[j] * w[perm[j]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Environment example_ca() {
  return Environment::single_minded_ca(3, {{0}, {1}, {2}, {0, 1, 2}});
}

}  // namespace

TEST_CASE("single item feasibility") {
  Environment env = Environment::single_item(3);
  CHECK(is_feasible(env, {1, 0, 0}));
  CHECK_FALSE(is_feasible(env, {1, 1, 0}));
  CHECK(is_feasible(env, {0.5, 0.25, 0.25}));
  CHECK_THROWS_AS(is_feasible(env, {1, 0}), input_error);
}

TEST_CASE("single-minded CA feasibility") {
  Environment env = example_ca();
  CHECK(is_feasible(env, {1, 1, 1, 0}));
  CHECK_FALSE(is_feasible(env, {1, 0, 0, 1}));
  CHECK(is_feasible(env, {0, 0, 0, 1}));
}

TEST_CASE("max weight: single item") {
  Environment env = Environment::single_item(3);
  MaxWeightResult r = max_weight_feasible(env, {0.5, 0.8, 0.3});
  CHECK(r.total == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(r.allocation == Allocation{0, 1, 0});
}

TEST_CASE("max weight: CA matches brute force") {
  Environment env = example_ca();
  Weights w{1, 1, 1, 1};
  Allocation oracle_alloc;
  double oracle = ca_brute_force(3, {{0}, {1}, {2}, {0, 1, 2}}, w, &oracle_alloc);
  CHECK(oracle == doctest::Approx(3.0));
  MaxWeightResult r = max_weight_feasible(env, w);
  CHECK(r.total == doctest::Approx(3.0));
  CHECK(r.allocation == Allocation{1, 1, 1, 0});

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> items(1, 4);
  for (int trial = 0; trial < 300; ++trial) {
    int m = items(rng);
    int n = 2 + static_cast<int>(rng() % 6);
    std::vector<std::vector<int>> demands(n);
    for (auto& d : demands) {
      for (int it = 0; it < m; ++it)
        if (rng() % 2) d.push_back(it);
      if (d.empty()) d.push_back(static_cast<int>(rng() % m));
    }
    Weights weights(n);
    for (auto& x : weights) x = u(rng);
    Environment e = Environment::single_minded_ca(m, demands);
    CHECK(max_weight_feasible(e, weights).total ==
          doctest::Approx(ca_brute_force(m, demands, weights)).epsilon(1e-12));
  }
}

TEST_CASE("max weight: position example and oracle") {
  Environment env = Environment::position({1.0, 0.5});
  SUBCASE("wrong agent count") {
    CHECK_THROWS_AS(max_weight_feasible(env, {2, 1, 3}), input_error);
  }
  // Two positions, three agents: embed as weights (1, 0.5, 0).
  Environment env3 = Environment::position({1.0, 0.5, 0.0});
  MaxWeightResult r = max_weight_feasible(env3, {2, 1, 3});
  CHECK(r.total == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(position_brute_force({1.0, 0.5, 0.0}, {2, 1, 3}) == doctest::Approx(4.0));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);  // up to 6
    std::vector<double> alpha(n);
    for (auto& a : alpha) a = u(rng);
    std::sort(alpha.rbegin(), alpha.rend());
    Weights w(n);
    for (auto& x : w) x = u(rng);
    Environment e = Environment::position(alpha);
    CHECK(max_weight_feasible(e, w).total ==
          doctest::Approx(position_brute_force(alpha, w)).epsilon(1e-12));
  }
}

TEST_CASE("optimal welfare examples") {
  CHECK(optimal_welfare(Environment::single_item(3), {1, 1, 1}) == doctest::Approx(1.0));
  CHECK(optimal_welfare(Environment::partial_allocation({0.4, 0.4, 1.0}), {1, 1, 1}) ==
        doctest::Approx(1.0));
  CHECK(optimal_welfare(Environment::k_unit(3, 2), {3, 1, 2}) == doctest::Approx(5.0));
}

TEST_CASE("matroid greedy equals brute force") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  // Exhaustive over all demand graphs for small sizes, then random larger.
  for (int n = 1; n <= 3; ++n) {
    for (int m = 1; m <= 3; ++m) {
      int graphs = 1 << (n * m);
      for (int g = 0; g < graphs; ++g) {
        std::vector<std::vector<int>> demand(n);
        for (int i = 0; i < n; ++i)
          for (int it = 0; it < m; ++it)
            if (g >> (i * m + it) & 1) demand[i].push_back(it);
        Weights w(n);
        for (auto& x : w) x = u(rng);
        Environment e = Environment::transversal_matroid(m, demand);
        CHECK(max_weight_feasible(e, w).total ==
              doctest::Approx(matroid_brute_force(m, demand, w)).epsilon(1e-12));
      }
    }
  }
  for (int trial = 0; trial < 500; ++trial) {
    int n = 2 + static_cast<int>(rng() % 7);  // up to 8
    int m = 1 + static_cast<int>(rng() % 6);
    std::vector<std::vector<int>> demand(n);
    for (auto& d : demand)
      for (int it = 0; it < m; ++it)
        if (rng() % 2) d.push_back(it);
    Weights w(n);
    for (auto& x : w) x = u(rng);
    Environment e = Environment::transversal_matroid(m, demand);
    CHECK(max_weight_feasible(e, w).total ==
          doctest::Approx(matroid_brute_force(m, demand, w)).epsilon(1e-12));
  }
}

TEST_CASE("matroid augmentation property (exhaustive small)") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);
    int m = 1 + static_cast<int>(rng() % 5);
    std::vector<std::vector<int>> demand(n);
    for (auto& d : demand)
      for (int it = 0; it < m; ++it)
        if (rng() % 2) d.push_back(it);
    Environment e = Environment::transversal_matroid(m, demand);
    // Collect independent sets.
    std::vector<std::vector<int>> indep;
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> agents;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) agents.push_back(i);
      Allocation y(n, 0.0);
      for (int i : agents) y[i] = 1.0;
      if (is_feasible(e, y)) indep.push_back(agents);
    }
    for (const auto& s1 : indep) {
      for (const auto& s2 : indep) {
        if (s1.size() <= s2.size()) continue;
        bool augmented = false;
        for (int i : s1) {
          if (std::find(s2.begin(), s2.end(), i) != s2.end()) continue;
          std::vector<int> grown = s2;
          grown.push_back(i);
          Allocation y(n, 0.0);
          for (int a : grown) y[a] = 1.0;
          if (is_feasible(e, y)) {
            augmented = true;
            break;
          }
        }
        CHECK(augmented);
      }
    }
  }
}

TEST_CASE("downward closure fuzz") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Environment> envs{
      Environment::single_item(4),
      Environment::k_unit(5, 2),
      Environment::transversal_matroid(3, {{0, 1}, {1}, {1, 2}, {0}}),
      example_ca(),
      Environment::position({1.0, 0.7, 0.3, 0.0}),
      Environment::partial_allocation({0.4, 0.9, 1.0}),
      Environment::mixture({{0.5, Environment::k_unit(3, 1)}, {0.5, Environment::k_unit(3, 2)}}),
  };
  for (const Environment& env : envs) {
    std::vector<Allocation> verts = feasible_vertices(env, 100000);
    for (int trial = 0; trial < 1000; ++trial) {
      // Random convex combination of two vertices stays feasible for the
      // fractional kinds; vertex draws cover the deterministic kinds.
      const Allocation& a = verts[rng() % verts.size()];
      const Allocation& b = verts[rng() % verts.size()];
      double lam = u(rng);
      Allocation y(env.agents());
      bool fractional_ok = env.kind() == EnvKind::SingleItem ||
                           env.kind() == EnvKind::KUnit ||
                           env.kind() == EnvKind::Position ||
                           env.kind() == EnvKind::PartialAllocation ||
                           env.kind() == EnvKind::Mixture;
      for (int i = 0; i < env.agents(); ++i)
        y[i] = fractional_ok ? lam * a[i] + (1 - lam) * b[i] : a[i];
      REQUIRE(is_feasible(env, y));
      for (int i = 0; i < env.agents(); ++i) {
        Allocation z = y;
        z[i] = 0.0;
        CHECK(is_feasible(env, z));
      }
    }
  }
}

TEST_CASE("mixture closed-form feasibility") {
  Environment mix = Environment::mixture(
      {{0.5, Environment::k_unit(3, 1)}, {0.5, Environment::k_unit(3, 2)}});
  CHECK(is_feasible(mix, {1.0, 0.5, 0.0}));
  CHECK(is_feasible(mix, {0.5, 0.5, 0.5}));
  CHECK_FALSE(is_feasible(mix, {1.0, 1.0, 0.0}));  // top-2 budget is 1.5
  // Position env equals the k-unit mixture with weight alpha_k - alpha_k+1.
  Environment pos = Environment::position({1.0, 0.5, 0.0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 2000; ++t) {
    Allocation y{u(rng), u(rng), u(rng)};
    CHECK(is_feasible(pos, y) == is_feasible(mix, y));
  }
}

TEST_CASE("max weight input validation") {
  Environment env = Environment::single_item(2);
  CHECK_THROWS_AS(max_weight_feasible(env, {-1.0, 0.0}), input_error);
  CHECK_THROWS_AS(max_weight_feasible(env, {kInf, 0.0}), input_error);
  Environment big = Environment::single_minded_ca(
      2, std::vector<std::vector<int>>(30, std::vector<int>{0}));
  CHECK_THROWS_AS(max_weight_feasible(big, Weights(30, 1.0)), budget_error);
}

TEST_CASE("vertex enumeration") {
  CHECK(feasible_vertices(Environment::single_item(3), 100).size() == 4);
  CHECK(feasible_vertices(Environment::partial_allocation({0.4, 0.0, 1.0}), 100).size() == 3);
  CHECK_THROWS_AS(feasible_vertices(Environment::k_unit(20, 10), 100), budget_error);
  // Position vertices: subsets assigned to top positions.
  auto verts = feasible_vertices(Environment::position({1.0, 0.5, 0.0}), 1000);
  for (const auto& v : verts) CHECK(is_feasible(Environment::position({1.0, 0.5, 0.0}), v));
}

TEST_CASE("environment constructor validation") {
  CHECK_THROWS_AS(Environment::k_unit(2, 3), input_error);
  CHECK_THROWS_AS(Environment::position({0.5, 1.0}), input_error);
  CHECK_THROWS_AS(Environment::single_minded_ca(2, {{}}), input_error);
  CHECK_THROWS_AS(Environment::mixture({{0.5, Environment::single_item(2)},
                                        {0.6, Environment::single_item(2)}}),
                  input_error);
}
