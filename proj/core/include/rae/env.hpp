#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "rae/common.hpp"

namespace rae {

// Per-agent allocation levels in [0,1] (a Position/Mixture level may be any
// fraction; the deterministic kinds produce 0/1 vectors).
using Allocation = std::vector<double>;
using Weights = std::vector<double>;

enum class EnvKind {
  SingleItem,
  KUnit,
  TransversalMatroid,
  SingleMindedCA,
  Position,
  PartialAllocation,
  Mixture,
};

// A downward-closed feasibility environment.  Immutable after construction;
// all operations on it are pure, so instances can be shared across threads.
class Environment {
 public:
  static Environment single_item(int n);
  static Environment k_unit(int n, int k);
  // demand_graph[i] lists the item indices (0-based, < num_items) agent i can
  // be matched to; a feasible winner set is one matchable to distinct items.
  static Environment transversal_matroid(int num_items,
                                         std::vector<std::vector<int>> demand_graph);
  // demands[i] is the nonempty bundle (0-based item indices) agent i wants in
  // full; feasible winner sets have pairwise disjoint bundles.
  static Environment single_minded_ca(int num_items,
                                      std::vector<std::vector<int>> demands);
  // weights sorted nonincreasing, each in [0,1]; length = agent count.
  static Environment position(std::vector<double> weights);
  // caps[i] in [0,1]; a feasible allocation serves one agent up to their cap
  // (or any convex combination of such selections).
  static Environment partial_allocation(std::vector<double> caps);
  // components share the agent count; weights nonnegative, summing to 1.
  static Environment mixture(std::vector<std::pair<double, Environment>> components);

  int agents() const { return n_; }
  EnvKind kind() const { return kind_; }

  int units() const;                                    // KUnit
  int items() const;                                    // matroid / CA
  const std::vector<std::vector<int>>& demand_sets() const;  // matroid / CA
  const std::vector<double>& position_weights() const;  // Position
  const std::vector<double>& caps() const;              // PartialAllocation
  const std::vector<std::pair<double, Environment>>& components() const;  // Mixture

 private:
  Environment() = default;

  int n_ = 0;
  EnvKind kind_ = EnvKind::SingleItem;
  int k_ = 1;
  int items_ = 0;
  std::vector<std::vector<int>> sets_;   // demand graph or bundles
  std::vector<double> levels_;           // position weights or caps
  std::shared_ptr<const std::vector<std::pair<double, Environment>>> components_;
};

// Membership test for the environment's feasible set.  Deterministic kinds
// (single item, k-unit, matroid, CA) accept 0/1 vectors only; Position,
// PartialAllocation and Mixture-of-unit-demand kinds accept the fractional
// convex hull.  Throws input_error on dimension mismatch.
bool is_feasible(const Environment& env, const Allocation& y, double tol = kTol);

struct MaxWeightResult {
  Allocation allocation;
  double total = 0.0;
};

// Exact max-weight feasible allocation.  Sort-based for single-item/k-unit,
// greedy for matroids, branch-and-bound for CA (n <= 24, budget error
// beyond), sorted assignment for Position, argmax w*cap for
// PartialAllocation, component-wise for Mixture.  Ties resolve to the
// lexicographically smallest winning set; zero-weight agents are never
// allocated.  Weights must be finite and nonnegative.
MaxWeightResult max_weight_feasible(const Environment& env, const Weights& w);

// E-free wrapper: max total value of a feasible allocation.
double optimal_welfare(const Environment& env, const ValueProfile& v);

// The extreme points of the feasible set (winner sets for deterministic
// kinds, top-prefix assignments for Position, full-cap selections for
// PartialAllocation, component sums for Mixture).  Throws budget_error when
// the vertex count would exceed `budget`.
std::vector<Allocation> feasible_vertices(const Environment& env, std::size_t budget);

// The feasible allocation that devotes the whole environment to agent i
// (their cap, the top position weight, or level 1 when the singleton is
// feasible; all-zero when it is not).
Allocation all_to_agent(const Environment& env, int i);

}  // namespace rae
