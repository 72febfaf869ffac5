#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "rae/dist.hpp"

using namespace rae;

namespace {

// Composite Simpson oracle used for the Myerson payment identity.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  if (b <= a) return 0.0;
  double h = (b - a) / (2 * n);
  double acc = f(a) + f(b);
  for (int j = 1; j < 2 * n; ++j) acc += f(a + j * h) * (j % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// E[phi(V) 1{V >= t}] including a top-of-support atom at its posted price.
double virtual_tail(const ValueDistribution& F, double t) {
  double hi = F.support_hi();
  double acc = simpson([&](double v) { return virtual_value(F, v) * F.density(v); },
                       std::max(t, F.support_lo() + 1e-12), hi - 1e-9);
  for (const Atom& a : F.atoms())
    if (a.value >= t && a.value >= hi - 1e-12) acc += a.value * a.mass;
  return acc;
}

}  // namespace

TEST_CASE("virtual values") {
  CHECK(virtual_value(ValueDistribution::uniform(0, 1), 0.7) == doctest::Approx(0.4));
  CHECK(virtual_value(ValueDistribution::equal_revenue(100), 3.0) == doctest::Approx(0.0));
  CHECK(virtual_value(ValueDistribution::uniform(0, 1), 0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(virtual_value(ValueDistribution::degenerate(1.0), 1.0), input_error);
  CHECK_THROWS_AS(virtual_value(ValueDistribution::example_cor(), 0.0), input_error);
}

TEST_CASE("monopoly reserves") {
  CHECK(monopoly_reserve(ValueDistribution::uniform(0, 1)) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(monopoly_reserve(ValueDistribution::degenerate(1.0)) == doctest::Approx(1.0));
  CHECK(monopoly_reserve(ValueDistribution::equal_revenue(100, 0.01)) == doctest::Approx(1.0));
  // The unperturbed equal-revenue reserve is the bottom of the support under
  // the infimum convention.
  CHECK(monopoly_reserve(ValueDistribution::equal_revenue(100)) == doctest::Approx(1.0));
}

TEST_CASE("myerson optimal revenue") {
  SUBCASE("single uniform agent posts 0.5") {
    double rev = myerson_optimal_revenue(Environment::single_item(1),
                                         {ValueDistribution::uniform(0, 1)});
    CHECK(rev == doctest::Approx(0.25).epsilon(1e-6));
  }
  SUBCASE("point mass and equal-revenue competitor") {
    double rev = myerson_optimal_revenue(
        Environment::single_item(2),
        {ValueDistribution::degenerate(1.0), ValueDistribution::equal_revenue(100)});
    CHECK(rev == doctest::Approx(2.0 - 1.0 / 100.0).epsilon(1e-12));
  }
  SUBCASE("single point mass") {
    double rev = myerson_optimal_revenue(Environment::single_item(1),
                                         {ValueDistribution::degenerate(1.0)});
    CHECK(rev == doctest::Approx(1.0));
  }
  SUBCASE("budget guard") {
    MyersonOptions opts;
    opts.nodes_per_agent = 3000;
    opts.budget = 1000;
    CHECK_THROWS_AS(myerson_optimal_revenue(
                        Environment::single_item(2),
                        {ValueDistribution::uniform(0, 1), ValueDistribution::uniform(0, 1)},
                        opts),
                    budget_error);
  }
}

TEST_CASE("discretize") {
  SUBCASE("uniform quantile midpoints") {
    ValueDistribution d = discretize(ValueDistribution::uniform(0, 1), 4);
    auto atoms = d.discrete_atoms();
    REQUIRE(atoms.size() == 4);
    std::vector<double> expect{0.125, 0.375, 0.625, 0.875};
    for (int j = 0; j < 4; ++j) {
      CHECK(atoms[j].value == doctest::Approx(expect[j]));
      CHECK(atoms[j].mass == doctest::Approx(0.25));
    }
  }
  SUBCASE("degenerate unchanged") {
    ValueDistribution d = discretize(ValueDistribution::degenerate(1.0), 16);
    CHECK(d.kind() == DistKind::Degenerate);
  }
  SUBCASE("atom preserved exactly") {
    ValueDistribution d = discretize(ValueDistribution::example_cor(), 100);
    auto atoms = d.discrete_atoms();
    CHECK(atoms.front().value == 0.0);
    CHECK(atoms.front().mass == doctest::Approx(1.0 / kE).epsilon(1e-15));
    double mean_err = std::fabs(d.mean() - ValueDistribution::example_cor().mean());
    CHECK(mean_err < 1e-3);
  }
}

TEST_CASE("myerson payment identity at posted prices") {
  // E[phi(V) 1{V>=t}] = t (1 - F(t-)) for regular F.
  for (double t : {0.2, 0.5, 0.8}) {
    ValueDistribution F = ValueDistribution::uniform(0, 1);
    CHECK(virtual_tail(F, t) == doctest::Approx(t * (1.0 - F.cdf(t))).epsilon(1e-6));
  }
  for (double t : {1.5, 3.0, 20.0}) {
    ValueDistribution F = ValueDistribution::equal_revenue(100);
    // 1 - F(t) = 1/t on the continuous part, so the identity gives 1.
    CHECK(virtual_tail(F, t) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("quantile inverts the cdf at continuity points") {
  std::vector<ValueDistribution> dists{
      ValueDistribution::uniform(0.2, 1.7),
      ValueDistribution::equal_revenue(50),
      ValueDistribution::example_cor(),
  };
  for (const auto& F : dists) {
    for (int j = 1; j < 50; ++j) {
      double v = F.support_lo() + (F.support_hi() - F.support_lo()) * j / 50.0;
      if (F.has_atom_at(v) || F.cdf(v) <= 0.0 || v >= F.support_hi()) continue;
      CHECK(F.quantile(F.cdf(v)) == doctest::Approx(v).epsilon(1e-9));
    }
  }
}

TEST_CASE("sampler passes a Kolmogorov-Smirnov band") {
  const int n = 100000;
  const double crit = 1.6276 / std::sqrt(static_cast<double>(n));  // 99% band
  std::vector<ValueDistribution> dists{
      ValueDistribution::uniform(0, 1),
      ValueDistribution::equal_revenue(10),
      ValueDistribution::example_cor(),
      ValueDistribution::discrete({{0.2, 0.3}, {0.7, 0.7}}),
  };
  Rng rng(20240518);
  for (const auto& F : dists) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = F.sample(rng);
    std::sort(xs.begin(), xs.end());
    // sup |F_n - F| over distinct sample values, atoms handled by comparing
    // both one-sided limits.
    double d_stat = 0.0;
    int run_start = 0;
    for (int j = 0; j < n; ++j) {
      if (j + 1 < n && xs[j + 1] == xs[j]) continue;
      double cdf = F.cdf(xs[j]);
      double cdf_left = F.cdf(xs[j] - 1e-9);
      d_stat = std::max(d_stat, std::fabs(cdf - static_cast<double>(j + 1) / n));
      d_stat = std::max(d_stat, std::fabs(cdf_left - static_cast<double>(run_start) / n));
      run_start = j + 1;
    }
    CHECK(d_stat < crit);
  }
}

TEST_CASE("joint scenario flags") {
  SUBCASE("product table is independent") {
    std::vector<std::vector<std::pair<double, std::pair<double, double>>>> per_agent{
        {{0.5, {0.0, 0.0}}, {0.5, {1.0, 0.5}}},
        {{0.25, {0.3, 0.1}}, {0.75, {0.9, 0.4}}},
    };
    JointScenario joint = product_scenario(per_agent);
    CHECK(joint.independent_values());
    CHECK(joint.no_bidder_communication());
  }
  SUBCASE("perfectly correlated pair is dependent") {
    std::vector<Scenario> rows{
        {0.5, {0.2, 0.2, 1.0}, {0.2, 0.2, 0.0}},
        {0.5, {0.6, 0.6, 1.0}, {0.6, 0.6, 0.0}},
    };
    JointScenario joint(std::move(rows));
    CHECK_FALSE(joint.independent_values());
    CHECK(joint.no_bidder_communication());  // each bid depends on own value only
  }
  SUBCASE("communication breaks the flag") {
    // Agent 0's action varies with agent 1's value at a fixed own value.
    std::vector<Scenario> rows{
        {0.5, {1.0, 0.2}, {0.2, 0.2}},
        {0.5, {1.0, 0.8}, {0.8, 0.8}},
    };
    JointScenario joint(std::move(rows));
    CHECK_FALSE(joint.no_bidder_communication());
  }
  SUBCASE("weights validated") {
    CHECK_THROWS_AS(JointScenario(std::vector<Scenario>{{0.5, {1.0}, {1.0}}}), input_error);
  }
}

TEST_CASE("conditional scenarios renormalize") {
  std::vector<Scenario> rows{
      {0.25, {0.0, 1.0}, {0.0, 0.3}},
      {0.25, {0.0, 2.0}, {0.0, 0.7}},
      {0.5, {1.0, 1.0}, {1.0, 0.3}},
  };
  JointScenario joint(std::move(rows));
  CHECK(joint.value_mass(0, 0.0) == doctest::Approx(0.5));
  auto cond = joint.conditional(0, 0.0);
  REQUIRE(cond.size() == 2);
  CHECK(cond[0].weight == doctest::Approx(0.5));
  CHECK_THROWS_AS(joint.conditional(0, 0.42), input_error);
}

TEST_CASE("equal-revenue moments") {
  ValueDistribution F = ValueDistribution::equal_revenue(100);
  CHECK(F.mean() == doctest::Approx(std::log(100.0) + 1.0).epsilon(1e-12));
  CHECK(F.cdf(100.0) == doctest::Approx(1.0));
  CHECK(F.cdf(1.0) == doctest::Approx(0.0));
}
