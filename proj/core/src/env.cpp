#include "rae/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

namespace rae {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

void check_weights(const Weights& w, int n) {
  require(static_cast<int>(w.size()) == n, "weight vector length mismatch");
  for (double x : w)
    require(std::isfinite(x) && x >= 0.0, "weights must be finite and nonnegative");
}

bool is_zero_one(double x, double tol) {
  return std::fabs(x) <= tol || std::fabs(x - 1.0) <= tol;
}

// Kuhn's augmenting-path matching: can every agent in `agents` be assigned a
// distinct item from its demand list?
bool matchable(const std::vector<std::vector<int>>& demand, int num_items,
               const std::vector<int>& agents) {
  std::vector<int> item_owner(num_items, -1);
  std::vector<char> visited;
  std::function<bool(int)> augment = [&](int a) -> bool {
    for (int it : demand[a]) {
      if (visited[it]) continue;
      visited[it] = 1;
      if (item_owner[it] < 0 || augment(item_owner[it])) {
        item_owner[it] = a;
        return true;
      }
    }
    return false;
  };
  for (int a : agents) {
    visited.assign(num_items, 0);
    if (!augment(a)) return false;
  }
  return true;
}

// Sum of the t largest entries for each t, compared against a concave budget.
bool majorized(std::vector<double> y, const std::vector<double>& prefix_budget,
               double tol) {
  std::sort(y.begin(), y.end(), std::greater<>());
  double acc = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] < -tol) return false;
    acc += y[t];
    double budget = t < prefix_budget.size() ? prefix_budget[t] : prefix_budget.back();
    if (acc > budget + tol) return false;
  }
  return true;
}

// Position-weight view of a unit-demand component: the level the j-th ranked
// agent receives.
std::vector<double> unit_demand_levels(const Environment& env) {
  std::vector<double> alpha(env.agents(), 0.0);
  switch (env.kind()) {
    case EnvKind::SingleItem:
      alpha[0] = 1.0;
      break;
    case EnvKind::KUnit:
      for (int j = 0; j < env.units(); ++j) alpha[j] = 1.0;
      break;
    case EnvKind::Position:
      alpha = env.position_weights();
      break;
    default:
      throw input_error("component is not a unit-demand kind");
  }
  return alpha;
}

bool unit_demand_kind(EnvKind k) {
  return k == EnvKind::SingleItem || k == EnvKind::KUnit || k == EnvKind::Position;
}

// Lexicographic order on winner sets encoded as sorted index lists.
bool lex_smaller(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

Environment Environment::single_item(int n) {
  require(n >= 1, "agent count must be positive");
  Environment e;
  e.n_ = n;
  e.kind_ = EnvKind::SingleItem;
  return e;
}

Environment Environment::k_unit(int n, int k) {
  require(n >= 1, "agent count must be positive");
  require(k >= 1 && k <= n, "k must satisfy 1 <= k <= n");
  Environment e;
  e.n_ = n;
  e.kind_ = EnvKind::KUnit;
  e.k_ = k;
  return e;
}

Environment Environment::transversal_matroid(int num_items,
                                             std::vector<std::vector<int>> demand_graph) {
  require(!demand_graph.empty(), "agent count must be positive");
  require(num_items >= 0, "item count must be nonnegative");
  for (auto& d : demand_graph) {
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    for (int it : d) require(it >= 0 && it < num_items, "item index out of range");
  }
  Environment e;
  e.n_ = static_cast<int>(demand_graph.size());
  e.kind_ = EnvKind::TransversalMatroid;
  e.items_ = num_items;
  e.sets_ = std::move(demand_graph);
  return e;
}

Environment Environment::single_minded_ca(int num_items,
                                          std::vector<std::vector<int>> demands) {
  require(!demands.empty(), "agent count must be positive");
  require(num_items >= 1, "item count must be positive");
  require(num_items <= 64, "single-minded CA supports at most 64 items");
  for (auto& d : demands) {
    require(!d.empty(), "CA demand sets must be nonempty");
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    for (int it : d) require(it >= 0 && it < num_items, "item index out of range");
  }
  Environment e;
  e.n_ = static_cast<int>(demands.size());
  e.kind_ = EnvKind::SingleMindedCA;
  e.items_ = num_items;
  e.sets_ = std::move(demands);
  return e;
}

Environment Environment::position(std::vector<double> weights) {
  require(!weights.empty(), "agent count must be positive");
  for (std::size_t j = 0; j < weights.size(); ++j) {
    require(weights[j] >= 0.0 && weights[j] <= 1.0, "position weights must lie in [0,1]");
    if (j > 0) require(weights[j] <= weights[j - 1] + 1e-12,
                       "position weights must be nonincreasing");
  }
  Environment e;
  e.n_ = static_cast<int>(weights.size());
  e.kind_ = EnvKind::Position;
  e.levels_ = std::move(weights);
  return e;
}

Environment Environment::partial_allocation(std::vector<double> caps) {
  require(!caps.empty(), "agent count must be positive");
  for (double c : caps) require(c >= 0.0 && c <= 1.0, "caps must lie in [0,1]");
  Environment e;
  e.n_ = static_cast<int>(caps.size());
  e.kind_ = EnvKind::PartialAllocation;
  e.levels_ = std::move(caps);
  return e;
}

Environment Environment::mixture(std::vector<std::pair<double, Environment>> components) {
  require(!components.empty(), "mixture needs at least one component");
  int n = components.front().second.agents();
  double total = 0.0;
  for (const auto& [w, env] : components) {
    require(w >= 0.0, "mixture weights must be nonnegative");
    require(env.agents() == n, "mixture components must share the agent count");
    total += w;
  }
  require(std::fabs(total - 1.0) <= 1e-12, "mixture weights must sum to 1");
  Environment e;
  e.n_ = n;
  e.kind_ = EnvKind::Mixture;
  e.components_ = std::make_shared<const std::vector<std::pair<double, Environment>>>(
      std::move(components));
  return e;
}

int Environment::units() const {
  require(kind_ == EnvKind::KUnit, "units(): not a k-unit environment");
  return k_;
}

int Environment::items() const {
  require(kind_ == EnvKind::TransversalMatroid || kind_ == EnvKind::SingleMindedCA,
          "items(): environment has no items");
  return items_;
}

const std::vector<std::vector<int>>& Environment::demand_sets() const {
  require(kind_ == EnvKind::TransversalMatroid || kind_ == EnvKind::SingleMindedCA,
          "demand_sets(): environment has no demand sets");
  return sets_;
}

const std::vector<double>& Environment::position_weights() const {
  require(kind_ == EnvKind::Position, "position_weights(): not a position environment");
  return levels_;
}

const std::vector<double>& Environment::caps() const {
  require(kind_ == EnvKind::PartialAllocation, "caps(): not a partial-allocation environment");
  return levels_;
}

const std::vector<std::pair<double, Environment>>& Environment::components() const {
  require(kind_ == EnvKind::Mixture, "components(): not a mixture environment");
  return *components_;
}

bool is_feasible(const Environment& env, const Allocation& y, double tol) {
  require(static_cast<int>(y.size()) == env.agents(), "allocation length mismatch");
  for (double x : y)
    if (!std::isfinite(x) || x < -tol || x > 1.0 + tol) return false;

  switch (env.kind()) {
    case EnvKind::SingleItem: {
      double s = std::accumulate(y.begin(), y.end(), 0.0);
      return s <= 1.0 + tol;
    }
    case EnvKind::KUnit: {
      double s = std::accumulate(y.begin(), y.end(), 0.0);
      return s <= env.units() + tol;
    }
    case EnvKind::TransversalMatroid: {
      std::vector<int> winners;
      for (int i = 0; i < env.agents(); ++i) {
        if (!is_zero_one(y[i], tol)) return false;
        if (y[i] > 0.5) winners.push_back(i);
      }
      return matchable(env.demand_sets(), env.items(), winners);
    }
    case EnvKind::SingleMindedCA: {
      std::uint64_t taken = 0;
      for (int i = 0; i < env.agents(); ++i) {
        if (!is_zero_one(y[i], tol)) return false;
        if (y[i] > 0.5) {
          std::uint64_t mask = 0;
          for (int it : env.demand_sets()[i]) mask |= (1ull << it);
          if (taken & mask) return false;
          taken |= mask;
        }
      }
      return true;
    }
    case EnvKind::Position: {
      const auto& alpha = env.position_weights();
      std::vector<double> prefix(alpha.size());
      std::partial_sum(alpha.begin(), alpha.end(), prefix.begin());
      return majorized(y, prefix, tol);
    }
    case EnvKind::PartialAllocation: {
      const auto& caps = env.caps();
      double load = 0.0;
      for (int i = 0; i < env.agents(); ++i) {
        if (y[i] <= tol) continue;
        if (caps[i] <= 0.0) return false;
        load += y[i] / caps[i];
      }
      return load <= 1.0 + tol;
    }
    case EnvKind::Mixture: {
      // Closed form only for mixtures of unit-demand components: the weighted
      // Minkowski sum of their symmetric polymatroids is the polymatroid of
      // the combined rank budget.
      bool all_unit = true;
      for (const auto& [w, comp] : env.components())
        if (!unit_demand_kind(comp.kind())) all_unit = false;
      if (all_unit) {
        std::vector<double> budget(env.agents(), 0.0);
        for (const auto& [w, comp] : env.components()) {
          std::vector<double> alpha = unit_demand_levels(comp);
          double acc = 0.0;
          for (int t = 0; t < env.agents(); ++t) {
            acc += alpha[t];
            budget[t] += w * acc;
          }
        }
        return majorized(y, budget, tol);
      }
      // Otherwise only vertex allocations are decided, by enumeration.
      std::vector<Allocation> verts = feasible_vertices(env, 4096);
      for (const auto& v : verts) {
        bool same = true;
        for (int i = 0; i < env.agents(); ++i)
          if (std::fabs(v[i] - y[i]) > tol) { same = false; break; }
        if (same) return true;
      }
      return false;
    }
  }
  return false;
}

namespace {

// Branch-and-bound winner determination for single-minded CA.  Agents are
// pre-sorted by weight; the suffix-sum bound prunes.  Ties resolve to the
// lexicographically smallest winner set.
struct CaSolver {
  const std::vector<std::uint64_t>& masks;
  const std::vector<double>& w;
  const std::vector<int>& order;  // agent indices, weight-descending
  std::vector<double> suffix;
  double best_total = 0.0;
  std::vector<int> best_set;
  std::vector<int> current;

  void solve(std::size_t pos, std::uint64_t taken, double total) {
    if (pos == order.size()) {
      finish(total);
      return;
    }
    if (total + suffix[pos] < best_total - 1e-12) return;  // prune
    int agent = order[pos];
    if (!(taken & masks[agent])) {
      current.push_back(agent);
      solve(pos + 1, taken | masks[agent], total + w[agent]);
      current.pop_back();
    }
    solve(pos + 1, taken, total);
  }

  void finish(double total) {
    std::vector<int> sorted = current;
    std::sort(sorted.begin(), sorted.end());
    if (total > best_total + 1e-12 ||
        (std::fabs(total - best_total) <= 1e-12 && lex_smaller(sorted, best_set))) {
      best_total = total;
      best_set = sorted;
    }
  }
};

MaxWeightResult solve_ca(const Environment& env, const Weights& w) {
  if (env.agents() > 24)
    throw budget_error("CA winner determination capped at 24 agents");
  std::vector<std::uint64_t> masks(env.agents(), 0);
  for (int i = 0; i < env.agents(); ++i)
    for (int it : env.demand_sets()[i]) masks[i] |= (1ull << it);

  std::vector<int> order;
  for (int i = 0; i < env.agents(); ++i)
    if (w[i] > 0.0) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return w[a] != w[b] ? w[a] > w[b] : a < b; });

  CaSolver solver{masks, w, order, {}, 0.0, {}, {}};
  solver.suffix.assign(order.size() + 1, 0.0);
  for (std::size_t i = order.size(); i-- > 0;)
    solver.suffix[i] = solver.suffix[i + 1] + w[order[i]];
  solver.best_set = {};  // empty set is feasible with total 0
  solver.solve(0, 0, 0.0);

  MaxWeightResult res;
  res.allocation.assign(env.agents(), 0.0);
  for (int i : solver.best_set) res.allocation[i] = 1.0;
  res.total = solver.best_total;
  return res;
}

}  // namespace

MaxWeightResult max_weight_feasible(const Environment& env, const Weights& w) {
  check_weights(w, env.agents());
  const int n = env.agents();
  MaxWeightResult res;
  res.allocation.assign(n, 0.0);

  auto positive_sorted = [&]() {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (w[i] > 0.0) idx.push_back(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return w[a] != w[b] ? w[a] > w[b] : a < b; });
    return idx;
  };

  switch (env.kind()) {
    case EnvKind::SingleItem: {
      auto idx = positive_sorted();
      if (!idx.empty()) {
        res.allocation[idx[0]] = 1.0;
        res.total = w[idx[0]];
      }
      return res;
    }
    case EnvKind::KUnit: {
      auto idx = positive_sorted();
      int take = std::min<int>(env.units(), static_cast<int>(idx.size()));
      for (int j = 0; j < take; ++j) {
        res.allocation[idx[j]] = 1.0;
        res.total += w[idx[j]];
      }
      return res;
    }
    case EnvKind::TransversalMatroid: {
      // Greedy by weight is exact on matroids.
      auto idx = positive_sorted();
      std::vector<int> winners;
      for (int i : idx) {
        winners.push_back(i);
        if (matchable(env.demand_sets(), env.items(), winners)) {
          res.allocation[i] = 1.0;
          res.total += w[i];
        } else {
          winners.pop_back();
        }
      }
      return res;
    }
    case EnvKind::SingleMindedCA:
      return solve_ca(env, w);
    case EnvKind::Position: {
      auto idx = positive_sorted();
      const auto& alpha = env.position_weights();
      for (std::size_t j = 0; j < idx.size() && j < alpha.size(); ++j) {
        res.allocation[idx[j]] = alpha[j];
        res.total += w[idx[j]] * alpha[j];
      }
      return res;
    }
    case EnvKind::PartialAllocation: {
      const auto& caps = env.caps();
      int best = -1;
      double best_val = 0.0;
      for (int i = 0; i < n; ++i) {
        double val = w[i] * caps[i];
        if (val > best_val + 1e-15) {
          best = i;
          best_val = val;
        }
      }
      if (best >= 0) {
        res.allocation[best] = caps[best];
        res.total = best_val;
      }
      return res;
    }
    case EnvKind::Mixture: {
      for (const auto& [wt, comp] : env.components()) {
        MaxWeightResult sub = max_weight_feasible(comp, w);
        for (int i = 0; i < n; ++i) res.allocation[i] += wt * sub.allocation[i];
        res.total += wt * sub.total;
      }
      return res;
    }
  }
  return res;
}

double optimal_welfare(const Environment& env, const ValueProfile& v) {
  return max_weight_feasible(env, v).total;
}

namespace {

void push_checked(std::vector<Allocation>& out, Allocation a, std::size_t budget) {
  if (out.size() >= budget) throw budget_error("vertex enumeration budget exceeded");
  out.push_back(std::move(a));
}

void enumerate_sets(const Environment& env, std::size_t budget,
                    std::vector<Allocation>& out) {
  const int n = env.agents();
  std::vector<int> current;
  std::function<bool(const std::vector<int>&)> ok;
  switch (env.kind()) {
    case EnvKind::SingleItem:
      ok = [](const std::vector<int>& s) { return s.size() <= 1; };
      break;
    case EnvKind::KUnit:
      ok = [&](const std::vector<int>& s) {
        return static_cast<int>(s.size()) <= env.units();
      };
      break;
    case EnvKind::TransversalMatroid:
      ok = [&](const std::vector<int>& s) {
        return matchable(env.demand_sets(), env.items(), s);
      };
      break;
    case EnvKind::SingleMindedCA:
      ok = [&](const std::vector<int>& s) {
        std::uint64_t taken = 0;
        for (int i : s) {
          std::uint64_t m = 0;
          for (int it : env.demand_sets()[i]) m |= (1ull << it);
          if (taken & m) return false;
          taken |= m;
        }
        return true;
      };
      break;
    default:
      throw input_error("enumerate_sets: unsupported kind");
  }
  std::function<void(int)> rec = [&](int next) {
    Allocation a(n, 0.0);
    for (int i : current) a[i] = 1.0;
    push_checked(out, std::move(a), budget);
    for (int i = next; i < n; ++i) {
      current.push_back(i);
      if (ok(current)) rec(i + 1);
      current.pop_back();
    }
  };
  rec(0);
}

}  // namespace

Allocation all_to_agent(const Environment& env, int i) {
  require(i >= 0 && i < env.agents(), "agent index out of range");
  const int n = env.agents();
  Allocation a(n, 0.0);
  switch (env.kind()) {
    case EnvKind::SingleItem:
    case EnvKind::KUnit:
    case EnvKind::SingleMindedCA:
      a[i] = 1.0;
      return a;
    case EnvKind::TransversalMatroid:
      if (matchable(env.demand_sets(), env.items(), {i})) a[i] = 1.0;
      return a;
    case EnvKind::Position:
      a[i] = env.position_weights().front();
      return a;
    case EnvKind::PartialAllocation:
      a[i] = env.caps()[i];
      return a;
    case EnvKind::Mixture: {
      for (const auto& [w, comp] : env.components()) {
        Allocation sub = all_to_agent(comp, i);
        a[i] += w * sub[i];
      }
      return a;
    }
  }
  return a;
}

std::vector<Allocation> feasible_vertices(const Environment& env, std::size_t budget) {
  std::vector<Allocation> out;
  const int n = env.agents();
  switch (env.kind()) {
    case EnvKind::SingleItem:
    case EnvKind::KUnit:
    case EnvKind::TransversalMatroid:
    case EnvKind::SingleMindedCA:
      enumerate_sets(env, budget, out);
      return out;
    case EnvKind::Position: {
      // Extreme points assign some subset of agents bijectively to the top
      // positions.
      const auto& alpha = env.position_weights();
      std::vector<int> chosen;
      std::function<void(std::size_t, Allocation&)> assign =
          [&](std::size_t pos, Allocation& acc) {
            if (pos == chosen.size()) {
              push_checked(out, acc, budget);
              return;
            }
            for (int agent : chosen) {
              if (acc[agent] != 0.0) continue;
              acc[agent] = alpha[pos] > 0.0 ? alpha[pos] : 0.0;
              assign(pos + 1, acc);
              acc[agent] = 0.0;
            }
          };
      std::function<void(int)> pick = [&](int next) {
        Allocation acc(n, 0.0);
        assign(0, acc);
        for (int i = next; i < n; ++i) {
          if (static_cast<int>(chosen.size()) >= n) break;
          chosen.push_back(i);
          pick(i + 1);
          chosen.pop_back();
        }
      };
      pick(0);
      // Duplicates arise when trailing alphas are zero; prune them.
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    case EnvKind::PartialAllocation: {
      push_checked(out, Allocation(n, 0.0), budget);
      for (int i = 0; i < n; ++i) {
        if (env.caps()[i] <= 0.0) continue;
        Allocation a(n, 0.0);
        a[i] = env.caps()[i];
        push_checked(out, std::move(a), budget);
      }
      return out;
    }
    case EnvKind::Mixture: {
      const auto& comps = env.components();
      std::vector<std::vector<Allocation>> per_comp;
      std::size_t combos = 1;
      for (const auto& [w, comp] : comps) {
        per_comp.push_back(feasible_vertices(comp, budget));
        combos *= per_comp.back().size();
        if (combos > budget) throw budget_error("mixture vertex budget exceeded");
      }
      std::vector<std::size_t> pick(comps.size(), 0);
      while (true) {
        Allocation a(n, 0.0);
        for (std::size_t c = 0; c < comps.size(); ++c)
          for (int i = 0; i < n; ++i)
            a[i] += comps[c].first * per_comp[c][pick[c]][i];
        push_checked(out, std::move(a), budget);
        std::size_t c = 0;
        while (c < comps.size() && ++pick[c] == per_comp[c].size()) {
          pick[c] = 0;
          ++c;
        }
        if (c == comps.size()) break;
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
  }
  return out;
}

}  // namespace rae
