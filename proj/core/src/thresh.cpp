#include "rae/thresh.hpp"

#include <algorithm>
#include <cmath>

namespace rae {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

double er_value(double d) {
  if (d < 0.0) return 0.0;
  if (d >= 1.0 - 1.0 / kE) return 1.0;
  return 1.0 / (kE * (1.0 - d));
}

double er_inverse(double x) {
  if (x <= 1.0 / kE) return 0.0;
  if (x > 1.0) return kInf;
  return 1.0 - 1.0 / (kE * x);
}

// integral of tau(x) = 1 - 1/(e x) over [a, b], both >= 1/e.
double er_tau_integral(double a, double b) {
  if (b <= a) return 0.0;
  return (b - a) - (std::log(b) - std::log(a)) / kE;
}

}  // namespace

InterimRule InterimRule::step(StepFunction sf) {
  InterimRule r;
  r.kind_ = Kind::Step;
  r.sf_ = std::move(sf);
  return r;
}

InterimRule InterimRule::er_shape() {
  InterimRule r;
  r.kind_ = Kind::ErShape;
  return r;
}

InterimRule InterimRule::linear_bid() {
  InterimRule r;
  r.kind_ = Kind::LinearBid;
  return r;
}

const StepFunction& InterimRule::step_function() const {
  require(kind_ == Kind::Step, "not a step rule");
  return sf_;
}

double InterimRule::value(double b) const {
  switch (kind_) {
    case Kind::Step:
      return sf_.value(b);
    case Kind::ErShape:
      return er_value(b);
    case Kind::LinearBid:
      return std::clamp(b, 0.0, 1.0);
  }
  return 0.0;
}

double InterimRule::inverse(double x) const {
  switch (kind_) {
    case Kind::Step:
      return sf_.inverse(x);
    case Kind::ErShape:
      return er_inverse(x);
    case Kind::LinearBid:
      if (x <= 0.0) return 0.0;
      return x <= 1.0 ? x : kInf;
  }
  return 0.0;
}

double InterimRule::sup_level() const {
  switch (kind_) {
    case Kind::Step:
      return sf_.sup_level();
    case Kind::ErShape:
    case Kind::LinearBid:
      return 1.0;
  }
  return 0.0;
}

double InterimRule::surplus(double z, double reserve, ReserveConvention conv) const {
  if (z <= 0.0) return 0.0;
  switch (kind_) {
    case Kind::Step:
      return threshold_surplus(sf_, z, reserve, conv);
    case Kind::ErShape: {
      if (z > 1.0 + 1e-12) return kInf;
      z = std::min(z, 1.0);
      // tau is 0 on [0, 1/e] and 1 - 1/(e x) above; both conventions cut at
      // the same level because tau is strictly increasing there.
      double lower = 1.0 / kE;
      if (reserve > 0.0) lower = std::max(lower, er_value(reserve));
      return z > lower ? er_tau_integral(lower, z) : 0.0;
    }
    case Kind::LinearBid: {
      if (z > 1.0 + 1e-12) return kInf;
      z = std::min(z, 1.0);
      double lower = std::clamp(reserve, 0.0, 1.0);
      return z > lower ? 0.5 * (z * z - lower * lower) : 0.0;
    }
  }
  return 0.0;
}

double InterimRule::partial_mean_above(double t) const {
  switch (kind_) {
    case Kind::Step: {
      double acc = 0.0;
      double prev = 0.0;
      for (const auto& [b, lvl] : sf_.breakpoints()) {
        if (b > t) acc += b * (lvl - prev);
        prev = lvl;
      }
      return acc;
    }
    case Kind::ErShape: {
      double top = 1.0 - 1.0 / kE;
      if (t >= top) return 0.0;
      double lo = std::max(t, 0.0);
      // integral of s/(e (1-s)^2) over [lo, top]
      auto prim = [](double s) { return 1.0 / (1.0 - s) + std::log(1.0 - s); };
      return (prim(top) - prim(lo)) / kE;
    }
    case Kind::LinearBid: {
      if (t >= 1.0) return 0.0;
      double lo = std::max(t, 0.0);
      return 0.5 * (1.0 - lo * lo);
    }
  }
  return 0.0;
}

std::vector<double> InterimRule::bid_candidates(double v, PaymentFormat format) const {
  std::vector<double> c{0.0};
  switch (kind_) {
    case Kind::Step:
      for (const auto& [b, lvl] : sf_.breakpoints()) c.push_back(b);
      break;
    case Kind::ErShape: {
      c.push_back(1.0 - 1.0 / kE);
      if (format == PaymentFormat::AllPay && v > 0.0) {
        double d = 1.0 - std::sqrt(v / kE);
        if (d > 0.0 && d < 1.0 - 1.0 / kE) c.push_back(d);
      }
      break;
    }
    case Kind::LinearBid: {
      c.push_back(1.0);
      if (format == PaymentFormat::WinnerPaysBid)
        c.push_back(std::clamp(0.5 * v, 0.0, 1.0));
      if (v > 0.0) c.push_back(std::min(v, 1.0));
      break;
    }
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

StepFunction InterimRule::to_step(int grid) const {
  if (kind_ == Kind::Step) return sf_;
  std::vector<std::pair<double, double>> pts;
  double top = kind_ == Kind::ErShape ? 1.0 - 1.0 / kE : 1.0;
  for (int j = 0; j <= grid; ++j) {
    double b = top * j / grid;
    pts.emplace_back(b, value(b));
  }
  return StepFunction::from_breakpoints(std::move(pts));
}

namespace {

std::vector<double> staircase_candidates(const Mechanism& mech, int i,
                                         const BidProfile& others) {
  std::vector<double> cands = mech.rule.threshold_candidates(i, others);
  if (mech.reserve(i) > 0.0) cands.push_back(mech.reserve(i));
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  return cands;
}

BidProfile insert_bid(const BidProfile& others, int i, double b) {
  BidProfile full = others;
  full.insert(full.begin() + i, b);
  return full;
}

}  // namespace

StepFunction own_bid_staircase(const Mechanism& mech, int i, const BidProfile& others) {
  require(i >= 0 && i < mech.agents(), "agent index out of range");
  require(static_cast<int>(others.size()) == mech.agents() - 1,
          "opponent profile must have n-1 bids");
  if (mech.rule.kind() == RuleKind::Mixture) {
    // Reserve zeroing commutes with the component decomposition, so the
    // mixture staircase is the weighted average of component staircases.
    std::vector<std::pair<double, StepFunction>> parts;
    for (const auto& [w, rule] : mech.rule.components()) {
      Mechanism sub{rule, mech.format, mech.reserves};
      parts.emplace_back(w, own_bid_staircase(sub, i, others));
    }
    return StepFunction::average(parts);
  }
  std::vector<double> cands = staircase_candidates(mech, i, others);
  double top = cands.back() + 1.0;
  for (double b : others) top = std::max(top, b + 1.0);

  auto level_at = [&](double b) {
    return run(mech, insert_bid(others, i, b)).allocation[i];
  };

  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    double hi = k + 1 < cands.size() ? cands[k + 1] : top;
    double mid = 0.5 * (cands[k] + hi);
    pts.emplace_back(cands[k], level_at(mid));
  }
  return StepFunction::from_breakpoints(std::move(pts));
}

double threshold_bid(const Mechanism& mech, int i, const BidProfile& others) {
  StepFunction sf = own_bid_staircase(mech, i, others);
  double target = sf.sup_level();
  if (target <= 0.0) return kInf;
  return sf.inverse(target);
}

double threshold_bid(const AllocationRule& rule, int i, const BidProfile& others) {
  return threshold_bid(winner_pays_bid(rule), i, others);
}

InterimRule interim_rule(const Mechanism& mech, const JointScenario& joint, int i,
                         double v) {
  // Per-row staircases are exact and cheap; the interim rule is their
  // conditional-weighted average.
  std::vector<std::pair<double, StepFunction>> parts;
  for (const Scenario& s : joint.conditional(i, v)) {
    BidProfile others;
    for (int j = 0; j < joint.agents(); ++j)
      if (j != i) others.push_back(s.actions[j]);
    parts.emplace_back(s.weight, own_bid_staircase(mech, i, others));
  }
  return InterimRule::step(StepFunction::average(parts));
}

double interim_payment(const Mechanism& mech, const JointScenario& joint, int i,
                       double v, double b) {
  std::vector<Scenario> cond = joint.conditional(i, v);
  double pay = 0.0;
  for (const Scenario& s : cond) {
    BidProfile others;
    for (int j = 0; j < joint.agents(); ++j)
      if (j != i) others.push_back(s.actions[j]);
    pay += s.weight * run(mech, insert_bid(others, i, b)).payments[i];
  }
  return pay;
}

double ppu_cost(const Mechanism& mech, const JointScenario& joint, int i, double v,
                double action) {
  std::vector<Scenario> cond = joint.conditional(i, v);
  double x = 0.0, p = 0.0;
  for (const Scenario& s : cond) {
    BidProfile others;
    for (int j = 0; j < joint.agents(); ++j)
      if (j != i) others.push_back(s.actions[j]);
    Outcome out = run(mech, insert_bid(others, i, action));
    x += s.weight * out.allocation[i];
    p += s.weight * out.payments[i];
  }
  if (x <= 0.0) return kInf;
  return p / x;
}

double ppu_cost(const Mechanism& mech, const JointScenario& joint, int i, double action) {
  double x = 0.0, p = 0.0;
  for (const Scenario& s : joint.table()) {
    BidProfile others;
    for (int j = 0; j < joint.agents(); ++j)
      if (j != i) others.push_back(s.actions[j]);
    Outcome out = run(mech, insert_bid(others, i, action));
    x += s.weight * out.allocation[i];
    p += s.weight * out.payments[i];
  }
  if (x <= 0.0) return kInf;
  return p / x;
}

BiddingOutcome BiddingOutcome::single(double v, double bid, InterimRule rule,
                                      PaymentFormat payment) {
  BiddingOutcome o;
  o.v = v;
  o.scenarios.push_back({1.0, bid, std::move(rule), payment});
  return o;
}

void BiddingOutcome::validate() const {
  require(v >= 0.0, "value must be >= 0");
  require(!scenarios.empty(), "bidding outcome needs at least one scenario");
  double total = 0.0;
  for (const auto& s : scenarios) {
    require(s.weight > 0.0, "scenario weights must be positive");
    require(std::isfinite(s.bid) && s.bid >= 0.0, "bids must be finite and >= 0");
    total += s.weight;
  }
  require(std::fabs(total - 1.0) <= 1e-9, "scenario weights must sum to 1");
}

double BiddingOutcome::utility() const {
  validate();
  double u = 0.0;
  for (const auto& s : scenarios) {
    double x = s.rule.value(s.bid);
    double p = s.payment == PaymentFormat::WinnerPaysBid ? s.bid * x : s.bid;
    u += s.weight * (v * x - p);
  }
  return u;
}

double BiddingOutcome::expected_allocation() const {
  double x = 0.0;
  for (const auto& s : scenarios) x += s.weight * s.rule.value(s.bid);
  return x;
}

InterimRule BiddingOutcome::expected_rule() const {
  validate();
  if (scenarios.size() == 1) return scenarios.front().rule;
  std::vector<std::pair<double, StepFunction>> parts;
  parts.reserve(scenarios.size());
  for (const auto& s : scenarios) {
    if (!s.rule.is_step())
      throw input_error("mixing analytic scenario rules: discretize them first");
    parts.emplace_back(s.weight, s.rule.step_function());
  }
  return InterimRule::step(StepFunction::average(parts));
}

CostFrontier cost_frontier(const BiddingOutcome& outcome, CostModel model) {
  outcome.validate();
  // Winner-pays-bid price per unit is the bid itself, so a single
  // winner-pays-bid scenario's frontier is its own allocation rule.
  std::vector<double> cands;
  for (const auto& s : outcome.scenarios) {
    auto sub = s.rule.bid_candidates(outcome.v, s.payment);
    cands.insert(cands.end(), sub.begin(), sub.end());
    if (!s.rule.is_step()) {
      // Continuous Pareto sets need dense sampling of the attainable pairs.
      for (const auto& [b, lvl] : s.rule.to_step(4096).breakpoints())
        cands.push_back(b);
    }
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  std::vector<CostPoint> points;
  for (double b : cands) {
    double x = 0.0, p = 0.0;
    for (const auto& s : outcome.scenarios) {
      double xb = s.rule.value(b);
      x += s.weight * xb;
      p += s.weight * (s.payment == PaymentFormat::WinnerPaysBid ? b * xb : b);
    }
    double cost = kInf;
    switch (model) {
      case CostModel::PricePerUnit:
        cost = x > 0.0 ? p / x : kInf;
        break;
      case CostModel::AllPayBid:
        cost = b;
        break;
    }
    points.push_back({cost, x});
  }
  return make_frontier(std::move(points));
}

double generalized_surplus(const BiddingOutcome& outcome, CostModel model, double z,
                           double reserve) {
  // Closed-form fast path: a single scenario whose cost function reduces to
  // the bid (WPB price per unit, or the all-pay gross bid) has generalized
  // surplus equal to the rule's own threshold surplus.
  if (outcome.scenarios.size() == 1) {
    const auto& s = outcome.scenarios.front();
    bool bid_cost = (model == CostModel::AllPayBid) ||
                    (model == CostModel::PricePerUnit &&
                     s.payment == PaymentFormat::WinnerPaysBid);
    if (bid_cost && !s.rule.is_step())
      return s.rule.surplus(z, reserve, ReserveConvention::ZeroBelowReserve);
  }
  if (model == CostModel::AllPayBid) {
    InterimRule avg = outcome.expected_rule();
    return avg.surplus(z, reserve, ReserveConvention::ZeroBelowReserve);
  }
  return cost_frontier(outcome, model).surplus(z, reserve);
}

}  // namespace rae
