#include "rae/eff.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace rae {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

constexpr double kBindTol = 1e-12;

BidProfile drop_agent(const BidProfile& full, int i) {
  BidProfile others = full;
  others.erase(others.begin() + i);
  return others;
}

// Candidate allocations for the inner surplus maximization.  Exhaustive
// vertex enumeration when it fits the budget; otherwise the zero vector and
// the per-agent full allocations (labeled non-exhaustive).
std::pair<std::vector<Allocation>, bool> surplus_candidates(const Environment& env,
                                                            std::size_t budget) {
  try {
    return {feasible_vertices(env, budget), true};
  } catch (const budget_error&) {
    std::vector<Allocation> cands;
    cands.emplace_back(env.agents(), 0.0);
    for (int i = 0; i < env.agents(); ++i) cands.push_back(all_to_agent(env, i));
    return {std::move(cands), false};
  }
}

}  // namespace

std::vector<double> ZGrid::values() const {
  require(points >= 2 && lo > 0.0 && lo < 1.0, "z grid needs points >= 2 and lo in (0,1)");
  std::vector<double> z(points);
  for (int j = 0; j < points; ++j)
    z[j] = lo * std::pow(1.0 / lo, static_cast<double>(j) / (points - 1));
  z.back() = 1.0;
  return z;
}

ProfileRatio ce_profile_ratio(const Mechanism& mech, const BidProfile& bids,
                              const CEOptions& opts) {
  const int n = mech.agents();
  ProfileRatio res;
  res.revenue = run(mech, bids).revenue();

  std::vector<StepFunction> stairs;
  stairs.reserve(n);
  res.thresholds.resize(n);
  for (int i = 0; i < n; ++i) {
    stairs.push_back(own_bid_staircase(mech, i, drop_agent(bids, i)));
    double sup = stairs.back().sup_level();
    res.thresholds[i] = sup > 0.0 ? stairs.back().inverse(sup) : kInf;
  }

  auto [cands, exact] = surplus_candidates(mech.rule.env(), opts.vertex_budget);
  res.surplus_exact = exact;
  res.surplus = 0.0;
  res.y.assign(n, 0.0);
  for (const Allocation& y : cands) {
    double s = 0.0;
    for (int i = 0; i < n && s < kInf; ++i) {
      if (y[i] <= 0.0) continue;
      s += threshold_surplus(stairs[i], y[i], mech.reserve(i),
                             ReserveConvention::IntegralLimit);
    }
    if (s > res.surplus) {
      res.surplus = s;
      res.y = y;
    }
  }

  if (std::isinf(res.surplus)) {
    // An allocation level is unreachable at any bid: the surplus benchmark
    // is unbounded and the ratio collapses.
    res.binding = true;
    res.ratio = 0.0;
    return res;
  }
  if (res.surplus > kBindTol) {
    res.binding = true;
    res.ratio = res.revenue / res.surplus;
  } else {
    res.binding = false;
    res.ratio = res.revenue <= kBindTol ? 1.0 : kInf;
  }
  return res;
}

CEReport ce_over_profiles(const Mechanism& mech, const std::vector<BidProfile>& profiles,
                          bool profiles_exhaustive, const CEOptions& opts) {
  CEReport report;
  report.exhaustive = profiles_exhaustive;
  report.surplus_exact = true;
  report.seed = opts.seed;
  report.mu_hat = kInf;
  bool any_binding = false;
  for (const BidProfile& b : profiles) {
    ProfileRatio r = ce_profile_ratio(mech, b, opts);
    ++report.evaluated;
    report.surplus_exact = report.surplus_exact && r.surplus_exact;
    if (!r.binding) continue;
    any_binding = true;
    if (r.ratio < report.mu_hat) {
      report.mu_hat = r.ratio;
      report.witness = {b, r.thresholds, r.y, r.revenue, r.surplus, r.ratio};
    }
  }
  if (!any_binding) {
    report.mu_hat = 1.0;  // vacuous: no profile constrains the ratio
    report.witness = CEWitness{};
  }
  return report;
}

CEReport ce_deterministic(const Mechanism& mech, const BidGrid& grid,
                          const CEOptions& opts) {
  const int n = mech.agents();
  std::vector<double> pts = grid.values();
  double total = std::pow(static_cast<double>(pts.size()), n);

  std::vector<BidProfile> profiles;
  bool exhaustive = total <= static_cast<double>(opts.exhaustive_budget);
  if (exhaustive) {
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      BidProfile b(n);
      for (int i = 0; i < n; ++i) b[i] = pts[pick[i]];
      profiles.push_back(std::move(b));
      int c = 0;
      while (c < n && ++pick[c] == pts.size()) {
        pick[c] = 0;
        ++c;
      }
      if (c == n) break;
    }
  } else {
    Rng rng(opts.seed);
    std::uniform_int_distribution<std::size_t> d(0, pts.size() - 1);
    for (int s = 0; s < opts.samples; ++s) {
      BidProfile b(n);
      for (int i = 0; i < n; ++i) b[i] = pts[d(rng)];
      profiles.push_back(std::move(b));
    }
  }
  return ce_over_profiles(mech, profiles, exhaustive, opts);
}

namespace {

// Shared state of the randomized-CE inner maximization.
struct InterimProblem {
  const Mechanism& mech;
  const JointScenario& joint;
  // Distinct value profiles (groups) with their weights.
  std::vector<ValueProfile> group_values;
  std::vector<double> group_weight;
  // Per agent: support values, masses, interim staircases.
  std::vector<std::vector<double>> support;
  std::vector<std::vector<double>> mass;
  std::vector<std::vector<StepFunction>> stairs;
  // group g contributes weight w to (i, support index k): cond[i][k] lists
  // (g, w / mass).
  std::vector<std::vector<std::vector<std::pair<std::size_t, double>>>> cond;

  double objective(const std::vector<std::size_t>& choice,
                   const std::vector<Allocation>& verts) const {
    double total = 0.0;
    const int n = joint.agents();
    for (int i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < support[i].size(); ++k) {
        double ybar = 0.0;
        for (const auto& [g, frac] : cond[i][k]) ybar += frac * verts[choice[g]][i];
        double t = threshold_surplus(stairs[i][k], ybar, mech.reserve(i),
                                     ReserveConvention::IntegralLimit);
        if (std::isinf(t)) return kInf;
        total += mass[i][k] * t;
      }
    }
    return total;
  }
};

InterimProblem build_interim_problem(const Mechanism& mech, const JointScenario& joint) {
  InterimProblem prob{mech, joint, {}, {}, {}, {}, {}, {}};
  const int n = joint.agents();

  auto same_profile = [](const ValueProfile& a, const ValueProfile& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::fabs(a[i] - b[i]) > 1e-12) return false;
    return true;
  };
  for (const Scenario& s : joint.table()) {
    bool found = false;
    for (std::size_t g = 0; g < prob.group_values.size(); ++g) {
      if (same_profile(prob.group_values[g], s.values)) {
        prob.group_weight[g] += s.weight;
        found = true;
        break;
      }
    }
    if (!found) {
      prob.group_values.push_back(s.values);
      prob.group_weight.push_back(s.weight);
    }
  }

  prob.support.resize(n);
  prob.mass.resize(n);
  prob.stairs.resize(n);
  prob.cond.resize(n);
  for (int i = 0; i < n; ++i) {
    prob.support[i] = joint.value_support(i);
    for (double v : prob.support[i]) {
      prob.mass[i].push_back(joint.value_mass(i, v));
      prob.stairs[i].push_back(interim_rule(mech, joint, i, v).step_function());
    }
    prob.cond[i].resize(prob.support[i].size());
    for (std::size_t g = 0; g < prob.group_values.size(); ++g) {
      double vi = prob.group_values[g][i];
      for (std::size_t k = 0; k < prob.support[i].size(); ++k) {
        if (std::fabs(prob.support[i][k] - vi) <= 1e-12) {
          prob.cond[i][k].emplace_back(g, prob.group_weight[g] / prob.mass[i][k]);
          break;
        }
      }
    }
  }
  return prob;
}

}  // namespace

CEReport ce_randomized(const Mechanism& mech, const JointScenario& joint,
                       const CEOptions& opts) {
  CEReport report;
  report.seed = opts.seed;
  double revenue = 0.0;
  for (const Scenario& s : joint.table()) revenue += s.weight * run(mech, s.actions).revenue();

  InterimProblem prob = build_interim_problem(mech, joint);
  auto [verts, verts_exact] = surplus_candidates(mech.rule.env(), opts.vertex_budget);
  report.surplus_exact = verts_exact;
  const std::size_t G = prob.group_values.size();

  double best = 0.0;
  std::vector<std::size_t> best_choice(G, 0);

  double combos = std::pow(static_cast<double>(verts.size()), static_cast<double>(G));
  bool exhaustive = verts_exact && combos <= static_cast<double>(opts.scenario_budget);
  if (exhaustive) {
    std::vector<std::size_t> choice(G, 0);
    while (true) {
      double val = prob.objective(choice, verts);
      if (val > best) {
        best = val;
        best_choice = choice;
      }
      std::size_t c = 0;
      while (c < G && ++choice[c] == verts.size()) {
        choice[c] = 0;
        ++c;
      }
      if (c == G) break;
    }
  } else {
    // Constant rules, then seeded coordinate ascent.
    for (std::size_t v = 0; v < verts.size(); ++v) {
      std::vector<std::size_t> choice(G, v);
      double val = prob.objective(choice, verts);
      if (val > best) {
        best = val;
        best_choice = choice;
      }
    }
    Rng rng(opts.seed);
    std::uniform_int_distribution<std::size_t> d(0, verts.size() - 1);
    for (int restart = 0; restart < opts.ascent_restarts; ++restart) {
      std::vector<std::size_t> choice(G);
      for (auto& c : choice) c = d(rng);
      double val = prob.objective(choice, verts);
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t g = 0; g < G; ++g) {
          std::size_t keep = choice[g];
          for (std::size_t v = 0; v < verts.size(); ++v) {
            if (v == keep) continue;
            choice[g] = v;
            double cand = prob.objective(choice, verts);
            if (cand > val + 1e-15) {
              val = cand;
              keep = v;
              improved = true;
            }
          }
          choice[g] = keep;
        }
      }
      if (val > best) {
        best = val;
        best_choice = choice;
      }
    }
  }
  report.exhaustive = exhaustive;
  report.evaluated = G;

  report.witness.revenue = revenue;
  report.witness.surplus = best;
  // Interim expected allocation per agent under the maximizer.
  report.witness.y.assign(joint.agents(), 0.0);
  for (std::size_t g = 0; g < G; ++g)
    for (int i = 0; i < joint.agents(); ++i)
      report.witness.y[i] += prob.group_weight[g] * verts[best_choice[g]][i];

  if (std::isinf(best)) {
    report.mu_hat = 0.0;
    report.witness.ratio = 0.0;
  } else if (best > kBindTol) {
    report.mu_hat = revenue / best;
    report.witness.ratio = report.mu_hat;
  } else {
    report.mu_hat = 1.0;
    report.witness.ratio = 1.0;
  }
  return report;
}

IEReport individual_efficiency(const BiddingOutcome& outcome, const ZGrid& grid) {
  outcome.validate();
  IEReport report;
  report.u = outcome.utility();
  if (outcome.v <= 0.0) {
    report.eta = 1.0;  // vacuous
    return report;
  }
  InterimRule rule = outcome.expected_rule();

  std::vector<double> zs = grid.values();
  if (rule.is_step())
    for (const auto& [b, lvl] : rule.step_function().breakpoints())
      if (lvl > grid.lo && lvl <= 1.0) zs.push_back(lvl);
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

  report.eta = kInf;
  report.curve.reserve(zs.size());
  for (double z : zs) {
    double t = rule.surplus(z, 0.0, ReserveConvention::IntegralLimit);
    double ratio = std::isinf(t) ? kInf : (report.u + t) / (outcome.v * z);
    report.curve.emplace_back(z, ratio);
    if (ratio < report.eta) {
      report.eta = ratio;
      report.z_star = z;
    }
  }
  if (std::isinf(report.eta)) {
    report.eta = 1.0;
    report.capped = true;
  }
  return report;
}

IEReport weak_individual_efficiency(const BiddingOutcome& outcome, CostModel model) {
  outcome.validate();
  IEReport report;
  report.weak = true;
  report.u = outcome.utility();
  report.z_star = 1.0;
  if (outcome.v <= 0.0) {
    report.eta = 1.0;
    return report;
  }
  double t1 = generalized_surplus(outcome, model, 1.0, 0.0);
  if (std::isinf(t1)) {
    report.eta = 1.0;
    report.capped = true;
    return report;
  }
  report.eta = (report.u + t1) / outcome.v;
  report.curve.emplace_back(1.0, report.eta);
  return report;
}

namespace {

// Best fixed-bid utility and its argmax over the scenario candidates.
std::pair<double, double> best_fixed_bid(const BiddingOutcome& outcome) {
  std::vector<double> cands;
  for (const auto& s : outcome.scenarios) {
    auto sub = s.rule.bid_candidates(outcome.v, s.payment);
    cands.insert(cands.end(), sub.begin(), sub.end());
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  double best_u = -kInf, best_b = 0.0;
  for (double d : cands) {
    double u = 0.0;
    for (const auto& s : outcome.scenarios) {
      double x = s.rule.value(d);
      double p = s.payment == PaymentFormat::WinnerPaysBid ? d * x : d;
      u += s.weight * (outcome.v * x - p);
    }
    if (u > best_u + 1e-12) {
      best_u = u;
      best_b = d;
    }
  }
  return {best_u, best_b};
}

}  // namespace

BoundReport eps_degradation_check(const BiddingOutcome& outcome, double eps,
                                  const ZGrid& grid) {
  require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
  BoundReport report;
  report.objective = "eps-degradation";
  auto [u_star, b_star] = best_fixed_bid(outcome);
  double u = outcome.utility();
  if (u + 1e-9 < (1.0 - eps) * u_star) {
    std::ostringstream os;
    os << "not a (1-eps)-best response: utility " << u << " < " << (1.0 - eps) * u_star
       << " at deviation " << b_star;
    report.pass = false;
    report.note = os.str();
    return report;
  }
  BiddingOutcome fixed = outcome;
  for (auto& s : fixed.scenarios) s.bid = b_star;
  double eta0 = individual_efficiency(fixed, grid).eta;
  double eta = individual_efficiency(outcome, grid).eta;
  report.lhs = eta;
  report.rhs = (1.0 - eps) * eta0;
  report.slack = report.lhs - report.rhs;
  report.pass = report.slack >= -1e-9;
  return report;
}

namespace {

// Kahan-compensated accumulation keeps long scenario sums near one ulp.
struct Accumulator {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

double expected_welfare(const Mechanism& mech, const JointScenario& joint) {
  Accumulator acc;
  for (const Scenario& s : joint.table()) {
    Outcome out = run(mech, s.actions);
    double w = 0.0;
    for (int i = 0; i < joint.agents(); ++i) w += s.values[i] * out.allocation[i];
    acc.add(s.weight * w);
  }
  return acc.sum;
}

double expected_revenue(const Mechanism& mech, const JointScenario& joint) {
  Accumulator acc;
  for (const Scenario& s : joint.table()) acc.add(s.weight * run(mech, s.actions).revenue());
  return acc.sum;
}

double optimal_expected_welfare(const Environment& env, const JointScenario& joint) {
  Accumulator acc;
  for (const Scenario& s : joint.table()) acc.add(s.weight * optimal_welfare(env, s.values));
  return acc.sum;
}

BoundReport welfare_bound_values(double achieved, double optimal, double mu, double eta) {
  BoundReport report;
  report.objective = "welfare";
  report.lhs = achieved;
  report.rhs = mu * eta * optimal;
  report.slack = report.lhs - report.rhs;
  report.pass = report.slack >= -1e-9;
  return report;
}

BoundReport welfare_bound_report(const Mechanism& mech, const JointScenario& joint,
                                 double mu, double eta) {
  return welfare_bound_values(expected_welfare(mech, joint),
                              optimal_expected_welfare(mech.rule.env(), joint), mu, eta);
}

BoundReport revenue_bound_report(const Mechanism& mech, const JointScenario& joint,
                                 const std::vector<ValueDistribution>& Fs, double mu,
                                 const MyersonOptions& myerson) {
  if (!joint.independent_values())
    throw input_error("revenue bound precondition violated: independent values");
  if (!joint.no_bidder_communication())
    throw input_error("revenue bound precondition violated: no bidder communication");
  for (const Scenario& s : joint.table())
    for (int i = 0; i < joint.agents(); ++i) {
      double r = mech.reserve(i);
      if ((s.values[i] >= r) != (s.actions[i] >= r))
        throw input_error("revenue bound precondition violated: respects reserves");
    }

  BoundReport report;
  report.objective = "revenue";
  report.lhs = expected_revenue(mech, joint);
  double opt = myerson_optimal_revenue(mech.rule.env(), Fs, myerson);
  report.rhs = mu * (kE - 1.0) / (2.0 * kE) * opt;
  report.slack = report.lhs - report.rhs;
  report.pass = report.slack >= -1e-9;
  std::ostringstream os;
  os << "optimal revenue " << opt;
  report.note = os.str();
  return report;
}

TradeoffReport tradeoff_margins(const BiddingOutcome& outcome,
                                const std::optional<ValueDistribution>& F,
                                std::optional<double> monopoly_r, const ZGrid& grid) {
  outcome.validate();
  TradeoffReport report;
  const double v = outcome.v;
  const double u = outcome.utility();
  InterimRule rule = outcome.expected_rule();
  const double target = (kE - 1.0) / kE;

  report.welfare.objective = "welfare-tradeoff";
  double margin = kInf;
  double zmin = 1.0;
  double resolution = 0.0;
  for (double z : grid.values()) {
    double t = rule.surplus(z, 0.0, ReserveConvention::IntegralLimit);
    if (std::isinf(t)) continue;
    double m = u + t - target * v * z;
    if (m < margin) {
      margin = m;
      zmin = z;
    }
    if (u + t > 0.0) resolution = std::max(resolution, v * z / (u + t));
  }
  report.welfare.lhs = margin;
  report.welfare.rhs = 0.0;
  report.welfare.slack = margin;
  report.welfare.pass = margin >= -1e-9;
  std::ostringstream os;
  os << "binding z " << zmin;
  report.welfare.note = os.str();
  report.welfare_resolution = resolution;

  if (F && monopoly_r) {
    double rstar = *monopoly_r;
    BoundReport rev;
    rev.objective = "revenue-tradeoff";
    if (v < rstar) {
      // Excluded agent: the virtual value is negative and the outcome bids
      // below the reserve, so the inequality holds vacuously.
      rev.pass = true;
      rev.note = "agent excluded by monopoly reserve";
      rev.lhs = 0.0;
      report.revenue = rev;
      return report;
    }
    for (const auto& s : outcome.scenarios)
      if (s.rule.value(s.bid) > 0.0 && s.bid < rstar - 1e-12)
        throw input_error("tradeoff precondition violated: winning action below reserve");
    double phi = virtual_value(*F, v);
    require(phi >= -1e-12, "tradeoff precondition violated: negative virtual value above reserve");
    phi = std::max(phi, 0.0);
    double xbar = outcome.expected_allocation();
    double rmargin = kInf;
    for (double z : grid.values()) {
      double t = rule.surplus(z, rstar, ReserveConvention::IntegralLimit);
      if (std::isinf(t)) continue;
      rmargin = std::min(rmargin, phi * xbar + t - target * phi * z);
    }
    rev.lhs = rmargin;
    rev.rhs = 0.0;
    rev.slack = rmargin;
    rev.pass = rmargin >= -1e-9;
    report.revenue = rev;
  }
  return report;
}

namespace {

struct ComposedScenario {
  // per agent: weighted actions (one optional bid per component)
  std::vector<std::vector<std::pair<double, ComposedAction>>> actions;
};

// Frontier of agent i over the given candidate actions, probabilities taken
// over the opponents' product play.
CostFrontier composed_frontier(const ComposedMechanism& mech, const ComposedScenario& sc,
                               int i, const std::vector<ComposedAction>& candidates) {
  const int n = static_cast<int>(sc.actions.size());
  // Enumerate opponents' combinations once.
  std::vector<std::pair<double, std::vector<ComposedAction>>> opp;
  std::vector<std::size_t> pick(n, 0);
  while (true) {
    double w = 1.0;
    std::vector<ComposedAction> prof(n);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      w *= sc.actions[j][pick[j]].first;
      prof[j] = sc.actions[j][pick[j]].second;
    }
    opp.emplace_back(w, std::move(prof));
    int c = 0;
    while (c < n && (c == i || ++pick[c] == sc.actions[c].size())) {
      if (c != i) pick[c] = 0;
      ++c;
    }
    if (c == n) break;
  }

  std::vector<CostPoint> points;
  for (const ComposedAction& a : candidates) {
    double x = 0.0, p = 0.0;
    for (const auto& [w, prof] : opp) {
      std::vector<ComposedAction> full = prof;
      full[i] = a;
      Outcome out = run(mech, full);
      x += w * out.allocation[i];
      p += w * out.payments[i];
    }
    points.push_back({x > 0.0 ? p / x : kInf, x});
  }
  return make_frontier(std::move(points));
}

}  // namespace

CompositionReport simultaneous_fpa_check(int agents, int copies, int actions_per_agent,
                                         int num_scenarios, std::uint64_t seed) {
  require(agents >= 2 && copies >= 1, "need >= 2 agents and >= 1 component");
  CompositionReport report;
  Rng rng(seed);
  std::uniform_int_distribution<int> bid_step(0, 20);
  std::uniform_int_distribution<int> withdraw(0, 3);

  std::vector<Mechanism> comps;
  for (int j = 0; j < copies; ++j)
    comps.push_back(winner_pays_bid(AllocationRule::highest_bids_win(
        Environment::single_item(agents), TieBreakPolicy::identity(agents))));
  ComposedMechanism mech = compose_simultaneous(comps);

  for (int sc_id = 0; sc_id < num_scenarios; ++sc_id) {
    ComposedScenario sc;
    sc.actions.resize(agents);
    for (int i = 0; i < agents; ++i) {
      double w = 1.0 / actions_per_agent;
      for (int a = 0; a < actions_per_agent; ++a) {
        ComposedAction act(copies);
        for (int j = 0; j < copies; ++j) {
          if (withdraw(rng) == 0)
            act[j] = std::nullopt;
          else
            act[j] = bid_step(rng) / 20.0;
        }
        sc.actions[i].emplace_back(w, std::move(act));
      }
    }

    // Expected revenue over the product play.
    double revenue = 0.0;
    {
      std::vector<std::size_t> pick(agents, 0);
      while (true) {
        double w = 1.0;
        std::vector<ComposedAction> prof(agents);
        for (int i = 0; i < agents; ++i) {
          w *= sc.actions[i][pick[i]].first;
          prof[i] = sc.actions[i][pick[i]].second;
        }
        revenue += w * run(mech, prof).revenue();
        int c = 0;
        while (c < agents && ++pick[c] == sc.actions[c].size()) {
          pick[c] = 0;
          ++c;
        }
        if (c == agents) break;
      }
    }

    // Candidate bids per component: every opponent bid, shifted copies to
    // take limits from above, and the withdraw action.
    std::vector<std::vector<std::optional<double>>> comp_cands(copies);
    for (int j = 0; j < copies; ++j) {
      std::vector<double> bids{0.0};
      for (int i = 0; i < agents; ++i)
        for (const auto& [w, act] : sc.actions[i])
          if (act[j]) bids.push_back(*act[j]);
      std::sort(bids.begin(), bids.end());
      bids.erase(std::unique(bids.begin(), bids.end()), bids.end());
      comp_cands[j].push_back(std::nullopt);
      for (double b : bids) {
        comp_cands[j].push_back(b);
        comp_cands[j].push_back(b + 1e-12);
      }
    }
    std::vector<ComposedAction> candidates;
    {
      std::vector<std::size_t> pick(copies, 0);
      while (true) {
        ComposedAction a(copies);
        for (int j = 0; j < copies; ++j) a[j] = comp_cands[j][pick[j]];
        candidates.push_back(std::move(a));
        int c = 0;
        while (c < copies && ++pick[c] == comp_cands[c].size()) {
          pick[c] = 0;
          ++c;
        }
        if (c == copies) break;
      }
    }

    std::vector<double> surplus_full(agents, 0.0);
    double dominance_gap = -kInf;
    for (int i = 0; i < agents; ++i) {
      CostFrontier composed = composed_frontier(mech, sc, i, candidates);
      surplus_full[i] = composed.surplus(1.0);
      for (int j = 0; j < copies; ++j) {
        std::vector<ComposedAction> solo;
        for (const auto& cb : comp_cands[j]) {
          ComposedAction a(copies, std::nullopt);
          a[j] = cb;
          solo.push_back(std::move(a));
        }
        CostFrontier component = composed_frontier(mech, sc, i, solo);
        for (int zi = 1; zi <= 10; ++zi) {
          double z = zi / 10.0;
          double tc = composed.surplus(z);
          double tj = component.surplus(z);
          if (std::isinf(tc)) continue;
          double gap = std::isinf(tj) ? -kInf : tc - tj;
          dominance_gap = std::max(dominance_gap, gap);
        }
      }
    }

    // Max feasible 0/1 allocation: one winner (or none) per component,
    // served at the max.
    double best = 0.0;
    std::vector<int> winner(copies, -1);
    std::function<void(int, std::vector<char>&)> rec = [&](int j, std::vector<char>& won) {
      if (j == copies) {
        double s = 0.0;
        for (int i = 0; i < agents; ++i)
          if (won[i]) s += surplus_full[i];
        best = std::max(best, s);
        return;
      }
      rec(j + 1, won);
      for (int i = 0; i < agents; ++i) {
        bool had = won[i];
        won[i] = 1;
        rec(j + 1, won);
        won[i] = had;
      }
    };
    std::vector<char> won(agents, 0);
    rec(0, won);

    double ratio = best > kBindTol ? revenue / best : 1.0;
    report.min_weak_ce = std::min(report.min_weak_ce, ratio);
    report.max_dominance_gap = std::max(report.max_dominance_gap, dominance_gap);
    ++report.scenarios;
  }
  report.pass = report.min_weak_ce >= 1.0 - 1e-9 && report.max_dominance_gap <= 1e-9;
  return report;
}

BoundReport single_buyer_welfare(const BiddingOutcome& outcome) {
  outcome.validate();
  double welfare = 0.0;
  double opt = 0.0;
  for (const auto& s : outcome.scenarios) {
    double xb = s.rule.value(s.bid);
    welfare += s.weight * (outcome.v * xb + s.rule.partial_mean_above(s.bid));
    opt += s.weight *
           (outcome.v * s.rule.value(outcome.v) + s.rule.partial_mean_above(outcome.v));
  }
  BoundReport report;
  report.objective = "single-buyer-welfare";
  double ratio = opt > 0.0 ? welfare / opt : 1.0;
  report.lhs = ratio;
  report.rhs = individual_efficiency(outcome).eta;
  report.slack = report.lhs - report.rhs;
  report.pass = report.slack >= -1e-9;
  std::ostringstream os;
  os << "welfare " << welfare << " optimal " << opt;
  report.note = os.str();
  return report;
}

}  // namespace rae
