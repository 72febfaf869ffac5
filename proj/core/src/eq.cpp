#include "rae/eq.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace rae {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

BidProfile insert_bid(const BidProfile& others, int i, double b) {
  BidProfile full = others;
  full.insert(full.begin() + i, b);
  return full;
}

// Composite Simpson on [a, b] with 2*half_steps panels.
double simpson(const std::function<double(double)>& f, double a, double b,
               int half_steps = 64) {
  if (b <= a) return 0.0;
  const int n = 2 * half_steps;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int j = 1; j < n; ++j) acc += f(a + j * h) * (j % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

std::vector<double> BidGrid::values() const {
  if (points < 2 || !(max_bid > 0.0)) throw input_error("bid grid needs >= 2 points and a positive max");
  std::vector<double> v(points);
  for (int j = 0; j < points; ++j) v[j] = max_bid * j / (points - 1);
  return v;
}

StrategyProfile::StrategyProfile(std::vector<std::vector<std::pair<double, double>>> tables)
    : tables_(std::move(tables)) {
  for (auto& t : tables_) std::sort(t.begin(), t.end());
}

double StrategyProfile::bid_for(int i, double v) const {
  const auto& t = tables_[i];
  for (const auto& [val, bid] : t)
    if (std::fabs(val - v) <= 1e-9) return bid;
  throw input_error("value not in the strategy table");
}

namespace {

struct DeviationModel {
  // Conditional opponent rows: weight and the n-1 opponent actions.
  std::vector<std::pair<double, BidProfile>> rows;
  StepFunction staircase;  // interim allocation of agent i (right-continuous)
};

DeviationModel deviation_model(const Mechanism& mech, const JointScenario& joint, int i,
                               double v) {
  DeviationModel m;
  for (const Scenario& s : joint.conditional(i, v)) {
    BidProfile others;
    for (int j = 0; j < joint.agents(); ++j)
      if (j != i) others.push_back(s.actions[j]);
    m.rows.emplace_back(s.weight, std::move(others));
  }
  m.staircase = interim_rule(mech, joint, i, v).step_function();
  return m;
}

double exact_utility(const Mechanism& mech, const DeviationModel& m, int i, double v,
                     double b) {
  double u = 0.0;
  for (const auto& [w, others] : m.rows) {
    Outcome out = run(mech, insert_bid(others, i, b));
    u += w * (v * out.allocation[i] - out.payments[i]);
  }
  return u;
}

double limit_utility(const Mechanism& mech, const DeviationModel& m, double v, double b) {
  double x = m.staircase.value(b);
  if (mech.format == PaymentFormat::WinnerPaysBid) return (v - b) * x;
  return v * x - b;
}

BestResponse best_response_impl(const Mechanism& mech, const DeviationModel& m, int i,
                                double v, const BidGrid& grid) {
  std::vector<double> cands = grid.values();
  double h = grid.spacing();
  for (const auto& [b, lvl] : m.staircase.breakpoints()) {
    cands.push_back(b);
    cands.push_back(b + h);
    if (b - h >= 0.0) cands.push_back(b - h);
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  // The supremum over deviations is attained by the limit-from-above
  // utilities of the right-continuous staircase: exact tie evaluations never
  // exceed them where they matter (bidding 0 dominates the negative range).
  BestResponse best{0.0, -kInf, true};
  for (double c : cands) {
    double u = limit_utility(mech, m, v, c);
    if (u > best.utility + 1e-12) best = {c, u, true};
  }
  best.attained = exact_utility(mech, m, i, v, best.bid) >= best.utility - 1e-12;
  return best;
}

}  // namespace

BestResponse best_response(const Mechanism& mech, const JointScenario& joint, int i,
                           double v, const BidGrid& grid) {
  return best_response_impl(mech, deviation_model(mech, joint, i, v), i, v, grid);
}

BestResponse best_response(const Mechanism& mech, const BidProfile& opponent_bids, int i,
                           double v, const BidGrid& grid) {
  DeviationModel m;
  m.rows.emplace_back(1.0, opponent_bids);
  m.staircase = own_bid_staircase(mech, i, opponent_bids);
  return best_response_impl(mech, m, i, v, grid);
}

BestResponse best_response_on_grid(const Mechanism& mech, const BidProfile& opponent_bids,
                                   int i, double v, const BidGrid& grid) {
  BestResponse best{0.0, -kInf, true};
  for (double c : grid.values()) {
    double u = 0.0;
    Outcome out = run(mech, insert_bid(opponent_bids, i, c));
    u = v * out.allocation[i] - out.payments[i];
    if (u > best.utility + 1e-12) best = {c, u, true};
  }
  return best;
}

BestResponse best_response(const InterimRule& rule, double v, PaymentFormat format) {
  BestResponse best{0.0, -kInf, true};
  for (double b : rule.bid_candidates(v, format)) {
    double x = rule.value(b);
    double p = format == PaymentFormat::WinnerPaysBid ? b * x : b;
    double u = v * x - p;
    if (u > best.utility + 1e-12) best = {b, u, true};
  }
  return best;
}

RegretReport regret(const Mechanism& mech, const JointScenario& joint, const BidGrid& grid) {
  RegretReport report;
  for (int i = 0; i < joint.agents(); ++i) {
    for (double v : joint.value_support(i)) {
      DeviationModel m = deviation_model(mech, joint, i, v);
      double u = 0.0;
      for (const Scenario& s : joint.conditional(i, v)) {
        Outcome out = run(mech, s.actions);
        u += s.weight * (v * out.allocation[i] - out.payments[i]);
      }
      BestResponse br = best_response_impl(mech, m, i, v, grid);
      double eps = 0.0;
      if (br.utility > 1e-12) eps = std::max(0.0, 1.0 - u / br.utility);
      report.entries.push_back({i, v, u, br.utility, eps});
      report.max_eps = std::max(report.max_eps, eps);
      report.max_gap = std::max(report.max_gap, br.utility - u);
    }
  }
  return report;
}

DynamicsResult br_dynamics(const Mechanism& mech, const ValueProfile& values,
                           const BidGrid& grid, DynamicsOptions opts) {
  const int n = mech.agents();
  require(static_cast<int>(values.size()) == n, "value profile length mismatch");
  BidProfile profile = opts.start.value_or(BidProfile(n, 0.0));
  require(static_cast<int>(profile.size()) == n, "start profile length mismatch");

  auto utility_of = [&](const BidProfile& b, int i) {
    Outcome out = run(mech, b);
    return values[i] * out.allocation[i] - out.payments[i];
  };
  // Regret within the grid game: deviations are playable grid bids, so a
  // fixed point of the dynamics is an exact equilibrium of the discretized
  // game and its eps is bounded by the grid resolution in the continuum.
  auto grid_regret = [&](const BidProfile& b) {
    RegretReport report;
    for (int i = 0; i < n; ++i) {
      double u_cur = utility_of(b, i);
      BidProfile others = b;
      others.erase(others.begin() + i);
      BestResponse br = best_response_on_grid(mech, others, i, values[i], grid);
      double u_star = std::max(br.utility, u_cur);
      double eps = u_star > 1e-12 ? std::max(0.0, 1.0 - u_cur / u_star) : 0.0;
      report.entries.push_back({i, values[i], u_cur, u_star, eps});
      report.max_eps = std::max(report.max_eps, eps);
      report.max_gap = std::max(report.max_gap, u_star - u_cur);
    }
    return report;
  };

  std::map<BidProfile, int> seen;
  std::vector<BidProfile> history;
  seen[profile] = 0;
  history.push_back(profile);

  DynamicsResult result;
  for (int round = 1; round <= opts.max_iters; ++round) {
    bool moved = false;
    for (int i = 0; i < n; ++i) {
      double u_cur = utility_of(profile, i);
      BidProfile others = profile;
      others.erase(others.begin() + i);
      BestResponse br = best_response_on_grid(mech, others, i, values[i], grid);
      if (br.utility > u_cur + 1e-12 && br.bid != profile[i]) {
        profile[i] = br.bid;
        moved = true;
      }
    }
    result.rounds = round;
    if (!moved) {
      result.converged = true;
      break;
    }
    auto it = seen.find(profile);
    if (it != seen.end()) {
      // Cycle: return the best profile seen inside it.
      double best_eps = kInf;
      BidProfile best = profile;
      RegretReport best_report;
      for (std::size_t k = it->second; k < history.size(); ++k) {
        RegretReport r = grid_regret(history[k]);
        if (r.max_eps < best_eps) {
          best_eps = r.max_eps;
          best = history[k];
          best_report = std::move(r);
        }
      }
      result.profile = best;
      result.regret = std::move(best_report);
      result.converged = false;
      return result;
    }
    seen[profile] = static_cast<int>(history.size());
    history.push_back(profile);
  }
  result.profile = profile;
  result.regret = grid_regret(profile);
  return result;
}

BneResult symmetric_bne(const ValueDistribution& F, int n, PaymentFormat format,
                        int grid_points) {
  require(n >= 2, "symmetric BNE needs at least two agents");
  require(grid_points >= 2, "value grid needs at least two points");
  BneResult result;
  if (F.kind() == DistKind::Degenerate) {
    // No competition below the common point: everyone bids zero.
    result.value_grid = {F.support_lo()};
    result.profile = StrategyProfile({{{F.support_lo(), 0.0}}});
    result.degenerate = true;
    return result;
  }
  require(F.atoms().empty(), "symmetric BNE oracle needs an atomless distribution");

  const double lo = F.support_lo();
  auto Fk = [&](double t) { return std::pow(F.cdf(t), n - 1); };

  std::vector<double> vals(grid_points);
  for (int j = 0; j < grid_points; ++j) vals[j] = F.quantile((j + 0.5) / grid_points);

  std::vector<std::pair<double, double>> table(grid_points);
  double integral = simpson(Fk, lo, vals[0]);
  for (int j = 0; j < grid_points; ++j) {
    if (j > 0) integral += simpson(Fk, vals[j - 1], vals[j]);
    double fk = Fk(vals[j]);
    double bid;
    if (format == PaymentFormat::WinnerPaysBid)
      bid = fk > 0.0 ? vals[j] - integral / fk : vals[j];
    else
      bid = vals[j] * fk - integral;
    table[j] = {vals[j], std::max(bid, 0.0)};
  }
  result.value_grid = vals;
  result.profile = StrategyProfile({table});
  return result;
}

JointScenario bne_joint(const BneResult& bne, int n) {
  const auto& table = bne.profile.table(0);
  std::vector<std::pair<double, std::pair<double, double>>> agent_rows;
  double w = 1.0 / static_cast<double>(table.size());
  for (const auto& [v, b] : table) agent_rows.push_back({w, {v, b}});
  std::vector<std::vector<std::pair<double, std::pair<double, double>>>> per_agent(
      n, agent_rows);
  return product_scenario(per_agent);
}

double symmetric_bne_revenue(const BneResult& bne, int n, PaymentFormat format) {
  const auto& table = bne.profile.table(0);
  const double g = static_cast<double>(table.size());
  if (format == PaymentFormat::AllPay) {
    double mean_bid = 0.0;
    for (const auto& [v, b] : table) mean_bid += b / g;
    return n * mean_bid;
  }
  // Winner pays the highest bid; bids are monotone in value.
  double rev = 0.0;
  for (std::size_t j = 0; j < table.size(); ++j) {
    double hi = static_cast<double>(j + 1) / g;
    double lo = static_cast<double>(j) / g;
    rev += table[j].second * (std::pow(hi, n) - std::pow(lo, n));
  }
  return rev;
}

namespace {

// Discretization used by the canonical equilibria: original atoms exact, the
// continuous part placed at quantile *right endpoints*.  With the
// equal-revenue-shaped laws this keeps the constructed play an exact
// equilibrium of the discrete instance: a tie-winning deviation to an atom v
// with inclusive cdf q satisfies (1 - v) q = 1/e on the nose, the same as
// the equilibrium utility.
std::vector<Atom> right_endpoint_atoms(const ValueDistribution& F, int grid) {
  std::vector<Atom> atoms = F.atoms();
  double atom_mass = 0.0;
  for (const Atom& a : atoms) atom_mass += a.mass;
  double qa = atom_mass;  // our laws carry their atom at the bottom
  for (int j = 0; j < grid; ++j) {
    double q = qa + (1.0 - qa) * (j + 1) / grid;
    atoms.push_back({F.quantile(q), (1.0 - qa) / grid});
  }
  return atoms;
}

}  // namespace

CanonicalExample canonical_example(const std::string& name, int discretization) {
  CanonicalExample ex;
  ex.name = name;
  if (name == "cor-welfare") {
    // Three agents, single item.  Agents 0 and 1 share a perfectly
    // correlated value with an atom at 0; agent 2 is deterministically 1 and
    // wins every tie.  Agents 0,1 bid their value; agent 2 bids 0.
    ex.env = Environment::single_item(3);
    auto tie = TieBreakPolicy::from_order({2, 0, 1});
    ex.mech = winner_pays_bid(AllocationRule::highest_bids_win(ex.env, tie));
    ValueDistribution F = ValueDistribution::example_cor();
    std::vector<Scenario> rows;
    for (const Atom& a : right_endpoint_atoms(F, discretization))
      rows.push_back({a.mass, {a.value, a.value, 1.0}, {a.value, a.value, 0.0}});
    ex.joint = JointScenario(std::move(rows));
    ex.tight_outcome = BiddingOutcome::single(1.0, 0.0, InterimRule::er_shape());
    // Exact piecewise integration: the atom serves agent 2 at value 1, the
    // continuous part serves the correlated pair at their value.
    double welfare = (1.0 / kE) * 1.0 + InterimRule::er_shape().partial_mean_above(0.0);
    ex.expected["welfare"] = welfare;
    ex.expected["opt_welfare"] = 1.0;
    ex.expected["mu"] = 1.0;
    ex.expected["eta"] = (kE - 1.0) / kE;
    return ex;
  }
  if (name == "rev-half") {
    // Two agents: a point mass at 1 and an equal-revenue competitor.  With
    // monopoly reserves (1,1) and ties favoring agent 1, both bid 1.
    const double H = 100.0;
    ex.env = Environment::single_item(2);
    auto tie = TieBreakPolicy::from_order({1, 0});
    ex.mech = winner_pays_bid(AllocationRule::highest_bids_win(ex.env, tie), {1.0, 1.0});
    ValueDistribution F1 = ValueDistribution::degenerate(1.0);
    ValueDistribution F2 = ValueDistribution::equal_revenue(H);
    ex.value_dists = {F1, F2};
    ValueDistribution F2d = discretize(F2, discretization);
    std::vector<Scenario> rows;
    for (const Atom& a : F2d.discrete_atoms())
      rows.push_back({a.mass, {1.0, a.value}, {1.0, 1.0}});
    ex.joint = JointScenario(std::move(rows));
    ex.expected["revenue"] = 1.0;
    ex.expected["myerson_revenue"] = 2.0 - 1.0 / H;
    ex.expected["mu"] = 1.0;
    ex.expected["revenue_bound"] = (kE - 1.0) / (2.0 * kE);
    return ex;
  }
  if (name == "partial-alloc") {
    // Mixture over partial-allocation environments with caps (theta, theta,
    // 1); values (1,1,1); agents 0,1 bid 1, agent 2 bids 0 and wins ties.
    ValueDistribution G = ValueDistribution::partial_alloc_g();
    std::vector<std::pair<double, Environment>> comps;
    std::vector<std::pair<double, AllocationRule>> rules;
    auto tie = TieBreakPolicy::from_order({2, 0, 1});
    for (const Atom& a : right_endpoint_atoms(G, discretization)) {
      Environment pa = Environment::partial_allocation({a.value, a.value, 1.0});
      rules.emplace_back(a.mass, AllocationRule::partial_allocation_hbw(pa, tie));
      comps.emplace_back(a.mass, std::move(pa));
    }
    ex.env = Environment::mixture(std::move(comps));
    ex.mech = winner_pays_bid(convex_combine(std::move(rules)));
    ex.joint = JointScenario(std::vector<Scenario>{{1.0, {1.0, 1.0, 1.0}, {1.0, 1.0, 0.0}}});
    double welfare = (1.0 / kE) * 1.0 + InterimRule::er_shape().partial_mean_above(0.0);
    ex.expected["welfare"] = welfare;
    ex.expected["opt_welfare"] = 1.0;
    ex.expected["mu"] = 1.0;
    return ex;
  }
  throw input_error("unknown canonical example: " + name);
}

}  // namespace rae
