#pragma once

#include <optional>
#include <vector>

#include "rae/common.hpp"
#include "rae/dist.hpp"
#include "rae/mech.hpp"
#include "rae/step_function.hpp"

namespace rae {

// An interim allocation rule: either an exact step function or one of the
// registered closed forms, whose integrals are evaluated analytically.
// Everything else goes through discretization.
class InterimRule {
 public:
  enum class Kind {
    Step,
    ErShape,    // x(d) = (e(1-d))^-1 on [0, 1-1/e], then 1
    LinearBid,  // x(b) = min(b, 1)
  };

  static InterimRule step(StepFunction sf);
  static InterimRule er_shape();
  static InterimRule linear_bid();

  Kind kind() const { return kind_; }
  bool is_step() const { return kind_ == Kind::Step; }
  const StepFunction& step_function() const;

  double value(double b) const;    // right-continuous
  double inverse(double x) const;  // tau(x) = inf{b : value(b) >= x}
  double sup_level() const;
  // Threshold surplus T(z | r), exact.
  double surplus(double z, double reserve = 0.0,
                 ReserveConvention conv = ReserveConvention::IntegralLimit) const;
  // E[V * 1{V > t}] when this rule is read as the CDF of an outside-option
  // value.  Exact (atoms at step jumps; closed forms for analytic kinds).
  double partial_mean_above(double t) const;
  // Bids that can support a best response for an agent with value v: step
  // breakpoints, or the closed-form optimizers of the analytic kinds.
  std::vector<double> bid_candidates(double v, PaymentFormat format) const;
  // Fine step approximation (used only when mixing analytic scenario rules).
  StepFunction to_step(int grid = 4096) const;

 private:
  Kind kind_ = Kind::Step;
  StepFunction sf_;
};

// tau_i(b_-i) = inf{b : agent i reaches their maximal attainable level}
// (level 1 for the deterministic kinds).  Exact: win status changes only at
// the rule's threshold candidates.  +inf when the agent can never win.
double threshold_bid(const AllocationRule& rule, int i, const BidProfile& others);
// Reserve-aware variant (bids below the reserve are zeroed by the rule).
double threshold_bid(const Mechanism& mech, int i, const BidProfile& others);

// Agent i's exact allocation staircase as a function of their own bid,
// holding the other bids fixed (right-continuous; ties at breakpoints follow
// the limit from above).
StepFunction own_bid_staircase(const Mechanism& mech, int i, const BidProfile& others);

// Interim rule x_i(b | v): the scenario-weighted allocation of bidding b
// against the conditional distribution of opponents given v_i = v.  Exact on
// the discrete support.  Throws input_error when v is not in the support.
InterimRule interim_rule(const Mechanism& mech, const JointScenario& joint, int i,
                         double v);

// Interim expected payment of bidding b in the same conditional model.
double interim_payment(const Mechanism& mech, const JointScenario& joint, int i,
                       double v, double b);

// Price per unit: interim payment / interim allocation; +inf when the
// allocation is zero.  The unconditional overload averages over the agent's
// value marginal (exact under no bidder communication).
double ppu_cost(const Mechanism& mech, const JointScenario& joint, int i, double v,
                double action);
double ppu_cost(const Mechanism& mech, const JointScenario& joint, int i, double action);

// One scenario of a single-agent bidding (or action) outcome.
struct BidScenario {
  double weight = 1.0;
  double bid = 0.0;
  InterimRule rule;
  PaymentFormat payment = PaymentFormat::WinnerPaysBid;
};

// Single-agent bidding outcome: a value and weighted scenarios of
// (bid, interim rule [, payment rule]).  Utility is recomputed on demand,
// never stored.
struct BiddingOutcome {
  double v = 0.0;
  std::vector<BidScenario> scenarios;

  static BiddingOutcome single(double v, double bid, InterimRule rule,
                               PaymentFormat payment = PaymentFormat::WinnerPaysBid);

  // u(D) = sum_theta w ( v x(b) - p(b) ), with p = b x for winner-pays-bid
  // and p = b for all-pay.
  double utility() const;
  // Expected allocation rule x(b) = E_theta[x^theta(b)].  Exact when all
  // scenarios are steps or there is a single scenario; otherwise analytic
  // components are discretized.
  InterimRule expected_rule() const;
  // E_theta[x^theta(b^theta)]: the realized expected allocation.
  double expected_allocation() const;

  void validate() const;  // weights sum to 1
};

// Generalized cost model for weak individual efficiency and generalized
// competitive-efficiency analyses.
enum class CostModel {
  PricePerUnit,  // beta(a) = interim payment / interim allocation
  AllPayBid,     // beta(b) = b (gross payment in an all-pay mechanism)
};

// The attainable (cost, allocation) set of an outcome under a cost model,
// with its Pareto frontier.  Exact for step rules (the infimum per level is
// attained in the limit at a breakpoint) and for the registered closed forms.
CostFrontier cost_frontier(const BiddingOutcome& outcome, CostModel model);

// Generalized threshold surplus of the outcome at allocation z (reserve
// discounted with the ZeroBelowReserve convention, matching generalized
// costs).  For CostModel::PricePerUnit on a single winner-pays-bid scenario
// this equals the bid-space threshold surplus.
double generalized_surplus(const BiddingOutcome& outcome, CostModel model, double z,
                           double reserve = 0.0);

}  // namespace rae
