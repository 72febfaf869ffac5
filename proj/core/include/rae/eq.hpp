#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rae/common.hpp"
#include "rae/dist.hpp"
#include "rae/mech.hpp"
#include "rae/thresh.hpp"

namespace rae {

// Uniformly spaced bid grid including 0.
struct BidGrid {
  double max_bid = 1.0;
  int points = 101;

  std::vector<double> values() const;
  double spacing() const { return max_bid / (points - 1); }
};

// Per-agent bid tables on discrete value supports.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(std::vector<std::vector<std::pair<double, double>>> tables);

  int agents() const { return static_cast<int>(tables_.size()); }
  double bid_for(int i, double v) const;  // exact support lookup
  const std::vector<std::pair<double, double>>& table(int i) const { return tables_[i]; }

 private:
  std::vector<std::vector<std::pair<double, double>>> tables_;
};

struct BestResponse {
  double bid = 0.0;
  double utility = 0.0;
  // false when the utility is a limit from above the reported bid (a tie the
  // policy resolves against the agent); the supremum is then approached, not
  // attained.
  bool attained = true;
};

// Supremum best response against the conditional opponent model of `joint`
// given v_i = v.  Candidates are the grid plus every opponent-induced
// breakpoint; tie points are evaluated both exactly and as limits from
// above.  Ties resolve to the lowest bid.
BestResponse best_response(const Mechanism& mech, const JointScenario& joint, int i,
                           double v, const BidGrid& grid);
// Complete-information variant against fixed opponent bids (n-1 of them).
BestResponse best_response(const Mechanism& mech, const BidProfile& opponent_bids,
                           int i, double v, const BidGrid& grid);
// Restricted to playable grid bids with exact mechanism evaluation.
BestResponse best_response_on_grid(const Mechanism& mech, const BidProfile& opponent_bids,
                                   int i, double v, const BidGrid& grid);
// Single-agent best response against an interim rule (right-continuous
// levels; the analytic kinds use their closed-form optimizers).
BestResponse best_response(const InterimRule& rule, double v, PaymentFormat format);

struct RegretEntry {
  int agent = 0;
  double value = 0.0;
  double utility = 0.0;
  double best_utility = 0.0;
  double eps = 0.0;  // max(0, 1 - u/u*), 0 when u* <= 0
};

struct RegretReport {
  std::vector<RegretEntry> entries;
  double max_eps = 0.0;  // multiplicative, per Def. of (1-eps)-best response
  // Largest absolute utility gap u* - u.  The multiplicative eps degenerates
  // when equilibrium utilities vanish; the absolute gap is what a grid
  // actually controls.
  double max_gap = 0.0;
};

// Multiplicative regret of the joint scenario's play, per agent and support
// value, against supremum deviations.
RegretReport regret(const Mechanism& mech, const JointScenario& joint, const BidGrid& grid);

struct DynamicsOptions {
  int max_iters = 2000;
  std::optional<BidProfile> start;
};

struct DynamicsResult {
  BidProfile profile;
  RegretReport regret;
  bool converged = false;
  int rounds = 0;
};

// Round-robin best-response dynamics for a complete-information instance.
// An agent moves only on strict improvement; stops at a fixed point or on a
// cycle (returning the best profile seen, flagged non-converged).  The
// reported regret is taken within the grid game (deviations restricted to
// playable grid bids), so a fixed point has regret 0 there and the continuum
// regret is bounded by the grid resolution.
DynamicsResult br_dynamics(const Mechanism& mech, const ValueProfile& values,
                           const BidGrid& grid, DynamicsOptions opts = {});

struct BneResult {
  StrategyProfile profile;
  std::vector<double> value_grid;  // quantile midpoints
  bool degenerate = false;
};

// Symmetric equilibrium bid function for n iid agents in a single-item
// auction: b(v) = E[max of n-1 draws | max <= v] for winner-pays-bid and
// the integral of t d(F^(n-1)) for all-pay; tabulated on a quantile grid.
// Requires an atomless F (a degenerate F returns zero bids, flagged).
BneResult symmetric_bne(const ValueDistribution& F, int n, PaymentFormat format,
                        int grid_points = 200);

// Product joint scenario of n iid agents playing the tabulated strategy.
JointScenario bne_joint(const BneResult& bne, int n);

// Exact expected revenue of the tabulated symmetric strategy via order
// statistics of the discrete value grid.
double symmetric_bne_revenue(const BneResult& bne, int n, PaymentFormat format);

// The built-in lower-bound instances, fully constructed with their
// equilibrium play and closed-form expected metrics.
struct CanonicalExample {
  std::string name;
  Environment env = Environment::single_item(1);
  Mechanism mech;
  JointScenario joint;                     // discretized equilibrium scenario
  std::optional<BiddingOutcome> tight_outcome;  // binding single-agent outcome
  std::vector<ValueDistribution> value_dists;   // empty when not meaningful
  std::map<std::string, double> expected;  // closed-form metrics
};

// names: "cor-welfare", "rev-half", "partial-alloc"
CanonicalExample canonical_example(const std::string& name, int discretization = 10000);

}  // namespace rae
