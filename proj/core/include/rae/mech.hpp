#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "rae/common.hpp"
#include "rae/env.hpp"

namespace rae {

// Deterministic tie resolution: agents earlier in `order` win ties.  A single
// policy per mechanism is applied consistently in rules, thresholds, and best
// responses.
class TieBreakPolicy {
 public:
  TieBreakPolicy() = default;
  static TieBreakPolicy identity(int n);
  // order[k] = agent favored at tie rank k; must be a permutation of 0..n-1.
  static TieBreakPolicy from_order(std::vector<int> order);
  // Convenience: the given agents move to the front, everyone else follows in
  // index order.
  static TieBreakPolicy favoring(int n, const std::vector<int>& front);

  int agents() const { return static_cast<int>(order_.size()); }
  int rank(int agent) const { return ranks_[agent]; }
  const std::vector<int>& order() const { return order_; }

 private:
  std::vector<int> order_;
  std::vector<int> ranks_;
};

enum class RuleKind {
  HighestBidsWin,
  GreedyByPriority,
  RankByBid,
  PartialAllocationHBW,
  Mixture,
};

// Named, closed-form priority families so configurations stay serializable.
enum class PriorityFamily {
  Identity,           // psi_i(b) = b
  BidOverSqrtDemand,  // psi_i(b) = b / sqrt(|S_i|)  (single-minded CA)
};

// A single-bid allocation rule over a feasibility environment.
//
// Scoring convention: an agent bidding 0 is never allocated while any
// competitor has a positive score; when every score is zero the rule
// allocates greedily in tie order (the tie-favored agent wins a degenerate
// all-zero contest).
class AllocationRule {
 public:
  // Placeholder single-item rule; assign a factory-built rule before use.
  AllocationRule() = default;

  static AllocationRule highest_bids_win(Environment env, TieBreakPolicy tiebreak);
  static AllocationRule greedy(Environment env, PriorityFamily family,
                               TieBreakPolicy tiebreak);
  static AllocationRule rank_by_bid(Environment position_env, TieBreakPolicy tiebreak);
  static AllocationRule partial_allocation_hbw(Environment pa_env,
                                               TieBreakPolicy tiebreak);

  Allocation evaluate(const BidProfile& bids) const;
  // Agents with participating[i] == false are absent: they can never win,
  // not even a degenerate all-zero tie.
  Allocation evaluate(const BidProfile& bids, const std::vector<char>& participating) const;

  const Environment& env() const { return env_; }
  RuleKind kind() const { return kind_; }
  PriorityFamily family() const { return family_; }
  const TieBreakPolicy& tiebreak() const { return tiebreak_; }
  const std::vector<std::pair<double, AllocationRule>>& components() const;

  double priority(int agent, double bid) const;
  // Bids at which agent i's allocation can change, fixing the others: the
  // exact breakpoint candidates for threshold and staircase computations.
  std::vector<double> threshold_candidates(int i, const BidProfile& others) const;

  friend AllocationRule convex_combine(std::vector<std::pair<double, AllocationRule>>);

 private:
  Environment env_ = Environment::single_item(1);
  RuleKind kind_ = RuleKind::HighestBidsWin;
  PriorityFamily family_ = PriorityFamily::Identity;
  TieBreakPolicy tiebreak_;
  std::shared_ptr<const std::vector<std::pair<double, AllocationRule>>> components_;
};

// Pointwise-averaged rule over the mixture of the component environments.
// Weights must be nonnegative and sum to 1 within 1e-9.
AllocationRule convex_combine(std::vector<std::pair<double, AllocationRule>> rules);

enum class PaymentFormat { WinnerPaysBid, AllPay };

struct Mechanism {
  AllocationRule rule;
  PaymentFormat format = PaymentFormat::WinnerPaysBid;
  std::vector<double> reserves;  // empty means all-zero

  int agents() const { return rule.env().agents(); }
  double reserve(int i) const {
    return reserves.empty() ? 0.0 : reserves[static_cast<std::size_t>(i)];
  }
};

Mechanism winner_pays_bid(AllocationRule rule, std::vector<double> reserves = {});
Mechanism all_pay(AllocationRule rule, std::vector<double> reserves = {});

struct Outcome {
  Allocation allocation;
  std::vector<double> payments;

  double revenue() const;
};

// Reserve handling: a bid below r_i is rejected before the rule runs (the
// agent cannot win, not even an all-zero tie, and pays nothing).  Payments
// for accepted bids follow the format exactly: p_i = b_i * x_i for
// winner-pays-bid, p_i = b_i for all-pay.
Outcome run(const Mechanism& mech, const BidProfile& bids);
Outcome run(const Mechanism& mech, const BidProfile& bids,
            const std::vector<char>& participating);

// Direct greedy winner determination (rule must be GreedyByPriority).
Allocation greedy_allocate(const AllocationRule& rule, const BidProfile& bids);

// Simultaneous composition: one bid (or withdraw) per component mechanism,
// service at the highest level across components, payments summed.
struct ComposedMechanism {
  std::vector<Mechanism> components;

  int agents() const { return components.front().agents(); }
};

// Per-agent action: one optional bid per component; nullopt is the withdraw
// action with guaranteed zero allocation and payment in that component.
using ComposedAction = std::vector<std::optional<double>>;
using ComposedProfile = std::vector<ComposedAction>;  // [agent][component]

ComposedMechanism compose_simultaneous(std::vector<Mechanism> mechs);
Outcome run(const ComposedMechanism& mech, const ComposedProfile& actions);

}  // namespace rae
