#include "rae/mech.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>

namespace rae {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

void check_bids(const BidProfile& bids, int n) {
  require(static_cast<int>(bids.size()) == n, "bid profile length mismatch");
  for (double b : bids)
    require(std::isfinite(b) && b >= 0.0, "bids must be finite and nonnegative");
}

}  // namespace

TieBreakPolicy TieBreakPolicy::identity(int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  return from_order(std::move(order));
}

TieBreakPolicy TieBreakPolicy::from_order(std::vector<int> order) {
  const int n = static_cast<int>(order.size());
  std::vector<int> ranks(n, -1);
  for (int r = 0; r < n; ++r) {
    int a = order[r];
    require(a >= 0 && a < n && ranks[a] < 0, "tie-break order must be a permutation");
    ranks[a] = r;
  }
  TieBreakPolicy p;
  p.order_ = std::move(order);
  p.ranks_ = std::move(ranks);
  return p;
}

TieBreakPolicy TieBreakPolicy::favoring(int n, const std::vector<int>& front) {
  std::vector<int> order = front;
  for (int i = 0; i < n; ++i)
    if (std::find(front.begin(), front.end(), i) == front.end()) order.push_back(i);
  return from_order(std::move(order));
}

AllocationRule AllocationRule::highest_bids_win(Environment env, TieBreakPolicy tiebreak) {
  require(tiebreak.agents() == env.agents(), "tie-break policy size mismatch");
  require(env.kind() == EnvKind::SingleItem || env.kind() == EnvKind::KUnit ||
              env.kind() == EnvKind::TransversalMatroid ||
              env.kind() == EnvKind::SingleMindedCA,
          "highest-bids-win needs a deterministic environment");
  AllocationRule r;
  r.env_ = std::move(env);
  r.kind_ = RuleKind::HighestBidsWin;
  r.tiebreak_ = std::move(tiebreak);
  return r;
}

AllocationRule AllocationRule::greedy(Environment env, PriorityFamily family,
                                      TieBreakPolicy tiebreak) {
  require(tiebreak.agents() == env.agents(), "tie-break policy size mismatch");
  require(env.kind() == EnvKind::SingleItem || env.kind() == EnvKind::KUnit ||
              env.kind() == EnvKind::TransversalMatroid ||
              env.kind() == EnvKind::SingleMindedCA,
          "greedy needs a deterministic environment");
  if (family == PriorityFamily::BidOverSqrtDemand)
    require(env.kind() == EnvKind::SingleMindedCA,
            "bid/sqrt(demand) priorities need a single-minded CA environment");
  AllocationRule r;
  r.env_ = std::move(env);
  r.kind_ = RuleKind::GreedyByPriority;
  r.family_ = family;
  r.tiebreak_ = std::move(tiebreak);
  return r;
}

AllocationRule AllocationRule::rank_by_bid(Environment position_env, TieBreakPolicy tiebreak) {
  require(position_env.kind() == EnvKind::Position,
          "rank-by-bid needs a position environment");
  require(tiebreak.agents() == position_env.agents(), "tie-break policy size mismatch");
  AllocationRule r;
  r.env_ = std::move(position_env);
  r.kind_ = RuleKind::RankByBid;
  r.tiebreak_ = std::move(tiebreak);
  return r;
}

AllocationRule AllocationRule::partial_allocation_hbw(Environment pa_env,
                                                      TieBreakPolicy tiebreak) {
  require(pa_env.kind() == EnvKind::PartialAllocation,
          "partial-allocation HBW needs a partial-allocation environment");
  require(tiebreak.agents() == pa_env.agents(), "tie-break policy size mismatch");
  AllocationRule r;
  r.env_ = std::move(pa_env);
  r.kind_ = RuleKind::PartialAllocationHBW;
  r.tiebreak_ = std::move(tiebreak);
  return r;
}

AllocationRule convex_combine(std::vector<std::pair<double, AllocationRule>> rules) {
  require(!rules.empty(), "convex combination needs at least one rule");
  double total = 0.0;
  const int n = rules.front().second.env().agents();
  for (const auto& [w, rule] : rules) {
    require(w >= 0.0, "combination weights must be nonnegative");
    require(rule.env().agents() == n, "combined rules must share the agent count");
    total += w;
  }
  require(std::fabs(total - 1.0) <= 1e-9, "combination weights must sum to 1");

  std::vector<std::pair<double, Environment>> comps;
  comps.reserve(rules.size());
  for (const auto& [w, rule] : rules) comps.emplace_back(w, rule.env());

  AllocationRule r;
  r.env_ = Environment::mixture(std::move(comps));
  r.kind_ = RuleKind::Mixture;
  r.tiebreak_ = rules.front().second.tiebreak();
  r.components_ = std::make_shared<const std::vector<std::pair<double, AllocationRule>>>(
      std::move(rules));
  return r;
}

const std::vector<std::pair<double, AllocationRule>>& AllocationRule::components() const {
  require(kind_ == RuleKind::Mixture, "components(): not a mixture rule");
  return *components_;
}

double AllocationRule::priority(int agent, double bid) const {
  switch (family_) {
    case PriorityFamily::Identity:
      return bid;
    case PriorityFamily::BidOverSqrtDemand:
      return bid / std::sqrt(static_cast<double>(env_.demand_sets()[agent].size()));
  }
  return bid;
}

namespace {

// Shared selection loop: agents sorted by (score desc, tie rank asc) are
// offered greedily to `try_add`.  When every participating score is zero the
// pass runs in pure tie order.
std::vector<int> score_order(const std::vector<double>& scores,
                             const std::vector<char>& participating,
                             const TieBreakPolicy& tiebreak) {
  const int n = static_cast<int>(scores.size());
  bool any_positive = false;
  for (int i = 0; i < n; ++i)
    if (participating[i] && scores[i] > 0.0) any_positive = true;

  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    if (!participating[i]) continue;
    if (any_positive && scores[i] <= 0.0) continue;
    idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return tiebreak.rank(a) < tiebreak.rank(b);
  });
  return idx;
}

// Maximum-total feasible set for CA highest-bids-win, ties preferring the set
// whose tie ranks are lexicographically smallest.
std::vector<int> ca_best_set(const Environment& env, const std::vector<double>& scores,
                             const std::vector<int>& candidates,
                             const TieBreakPolicy& tiebreak) {
  std::vector<std::uint64_t> masks(env.agents(), 0);
  for (int i : candidates)
    for (int it : env.demand_sets()[i]) masks[i] |= (1ull << it);

  std::vector<int> order = candidates;  // score-descending already
  std::vector<double> suffix(order.size() + 1, 0.0);
  for (std::size_t i = order.size(); i-- > 0;)
    suffix[i] = suffix[i + 1] + scores[order[i]];

  double best_total = -1.0;
  std::vector<int> best_ranks;
  std::vector<int> best_set;
  std::vector<int> current;

  std::function<void(std::size_t, std::uint64_t, double)> rec =
      [&](std::size_t pos, std::uint64_t taken, double total) {
        if (total + suffix[pos] < best_total - 1e-12) return;
        if (pos == order.size()) {
          std::vector<int> ranks;
          ranks.reserve(current.size());
          for (int i : current) ranks.push_back(tiebreak.rank(i));
          std::sort(ranks.begin(), ranks.end());
          if (total > best_total + 1e-12 ||
              (std::fabs(total - best_total) <= 1e-12 &&
               std::lexicographical_compare(ranks.begin(), ranks.end(),
                                            best_ranks.begin(), best_ranks.end()))) {
            best_total = total;
            best_ranks = std::move(ranks);
            best_set = current;
          }
          return;
        }
        int agent = order[pos];
        if (!(taken & masks[agent])) {
          current.push_back(agent);
          rec(pos + 1, taken | masks[agent], total + scores[agent]);
          current.pop_back();
        }
        rec(pos + 1, taken, total);
      };
  rec(0, 0, 0.0);
  return best_set;
}

}  // namespace

Allocation AllocationRule::evaluate(const BidProfile& bids) const {
  return evaluate(bids, std::vector<char>(bids.size(), 1));
}

Allocation AllocationRule::evaluate(const BidProfile& bids,
                                    const std::vector<char>& participating) const {
  const int n = env_.agents();
  check_bids(bids, n);
  require(static_cast<int>(participating.size()) == n, "participation mask mismatch");
  Allocation x(n, 0.0);

  switch (kind_) {
    case RuleKind::Mixture: {
      for (const auto& [w, rule] : *components_) {
        Allocation sub = rule.evaluate(bids, participating);
        for (int i = 0; i < n; ++i) x[i] += w * sub[i];
      }
      return x;
    }
    case RuleKind::HighestBidsWin:
    case RuleKind::GreedyByPriority: {
      std::vector<double> scores(n, 0.0);
      bool any_positive = false;
      for (int i = 0; i < n; ++i) {
        if (participating[i]) scores[i] = priority(i, bids[i]);
        if (scores[i] > 0.0) any_positive = true;
      }
      std::vector<int> order = score_order(scores, participating, tiebreak_);

      if (kind_ == RuleKind::HighestBidsWin && env_.kind() == EnvKind::SingleMindedCA &&
          any_positive) {
        // Exact winner determination; greedy would not maximize the total.
        // (The all-zero tie pass below covers the degenerate case the same
        // way as the other kinds.)
        for (int i : ca_best_set(env_, scores, order, tiebreak_)) x[i] = 1.0;
        return x;
      }
      // Greedy insertion is exact for the remaining (matroid) kinds and is
      // the definition of the greedy rule.
      std::vector<int> winners;
      for (int i : order) {
        winners.push_back(i);
        Allocation probe(n, 0.0);
        for (int j : winners) probe[j] = 1.0;
        if (is_feasible(env_, probe)) {
          x[i] = 1.0;
        } else {
          winners.pop_back();
        }
      }
      return x;
    }
    case RuleKind::RankByBid: {
      std::vector<double> scores(n, 0.0);
      for (int i = 0; i < n; ++i)
        if (participating[i]) scores[i] = bids[i];
      std::vector<int> order = score_order(scores, participating, tiebreak_);
      const auto& alpha = env_.position_weights();
      for (std::size_t j = 0; j < order.size() && j < alpha.size(); ++j)
        x[order[j]] = alpha[j];
      return x;
    }
    case RuleKind::PartialAllocationHBW: {
      const auto& caps = env_.caps();
      std::vector<double> scores(n, 0.0);
      for (int i = 0; i < n; ++i)
        if (participating[i]) scores[i] = bids[i] * caps[i];
      std::vector<int> order = score_order(scores, participating, tiebreak_);
      if (!order.empty()) x[order[0]] = caps[order[0]];
      return x;
    }
  }
  return x;
}

std::vector<double> AllocationRule::threshold_candidates(int i, const BidProfile& others) const {
  const int n = env_.agents();
  require(i >= 0 && i < n, "agent index out of range");
  require(static_cast<int>(others.size()) == n - 1, "opponent profile must have n-1 bids");

  std::vector<double> cands{0.0};
  auto opponent_score = [&](int j) {
    double b = others[static_cast<std::size_t>(j < i ? j : j - 1)];
    return priority(j, b);
  };

  switch (kind_) {
    case RuleKind::Mixture: {
      for (const auto& [w, rule] : *components_) {
        auto sub = rule.threshold_candidates(i, others);
        cands.insert(cands.end(), sub.begin(), sub.end());
      }
      break;
    }
    case RuleKind::PartialAllocationHBW: {
      // Own score b*cap_i crosses opponent scores at b = score_j / cap_i.
      double cap = env_.caps()[i];
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double sj = others[static_cast<std::size_t>(j < i ? j : j - 1)] * env_.caps()[j];
        if (cap > 0.0) cands.push_back(sj / cap);
      }
      break;
    }
    case RuleKind::HighestBidsWin:
      if (env_.kind() == EnvKind::SingleMindedCA) {
        // Winner-set totals change at sums/differences of opponent scores;
        // the exact threshold is best-without minus best-compatible, but all
        // pairwise partial sums are safe candidates.
        std::vector<double> sums{0.0};
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          double bj = opponent_score(j);
          std::size_t sz = sums.size();
          for (std::size_t s = 0; s < sz; ++s) sums.push_back(sums[s] + bj);
        }
        for (double a : sums)
          for (double b : sums)
            if (a - b > 0.0) cands.push_back(a - b);
        break;
      }
      [[fallthrough]];
    case RuleKind::GreedyByPriority:
    case RuleKind::RankByBid: {
      // Own priority crosses each opponent's priority once.
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double target = opponent_score(j);
        double b = target;
        if (family_ == PriorityFamily::BidOverSqrtDemand)
          b = target * std::sqrt(static_cast<double>(env_.demand_sets()[i].size()));
        cands.push_back(b);
      }
      break;
    }
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  return cands;
}

Mechanism winner_pays_bid(AllocationRule rule, std::vector<double> reserves) {
  Mechanism m{std::move(rule), PaymentFormat::WinnerPaysBid, std::move(reserves)};
  if (!m.reserves.empty()) {
    if (static_cast<int>(m.reserves.size()) != m.agents())
      throw input_error("reserve vector length mismatch");
    for (double r : m.reserves)
      if (!(std::isfinite(r) && r >= 0.0)) throw input_error("reserves must be >= 0");
  }
  return m;
}

Mechanism all_pay(AllocationRule rule, std::vector<double> reserves) {
  Mechanism m = winner_pays_bid(std::move(rule), std::move(reserves));
  m.format = PaymentFormat::AllPay;
  return m;
}

double Outcome::revenue() const {
  return std::accumulate(payments.begin(), payments.end(), 0.0);
}

Outcome run(const Mechanism& mech, const BidProfile& bids) {
  return run(mech, bids, std::vector<char>(bids.size(), 1));
}

Outcome run(const Mechanism& mech, const BidProfile& bids,
            const std::vector<char>& participating) {
  const int n = mech.agents();
  check_bids(bids, n);
  // A bid below the reserve is rejected outright: the agent cannot be
  // allocated (not even in a degenerate all-zero tie) and pays nothing.
  BidProfile effective = bids;
  std::vector<char> present = participating;
  for (int i = 0; i < n; ++i) {
    if (effective[i] < mech.reserve(i)) {
      effective[i] = 0.0;
      present[i] = 0;
    }
  }

  Outcome out;
  out.allocation = mech.rule.evaluate(effective, present);
  out.payments.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (!present[i]) continue;
    if (mech.format == PaymentFormat::WinnerPaysBid)
      out.payments[i] = bids[i] * out.allocation[i];
    else
      out.payments[i] = bids[i];
  }
  return out;
}

Allocation greedy_allocate(const AllocationRule& rule, const BidProfile& bids) {
  if (rule.kind() != RuleKind::GreedyByPriority)
    throw input_error("greedy_allocate needs a greedy rule");
  return rule.evaluate(bids);
}

ComposedMechanism compose_simultaneous(std::vector<Mechanism> mechs) {
  if (mechs.empty()) throw input_error("composition needs at least one mechanism");
  int n = mechs.front().agents();
  for (const auto& m : mechs)
    if (m.agents() != n) throw input_error("composed mechanisms must share the agent count");
  return ComposedMechanism{std::move(mechs)};
}

Outcome run(const ComposedMechanism& mech, const ComposedProfile& actions) {
  const int n = mech.agents();
  const std::size_t m = mech.components.size();
  if (static_cast<int>(actions.size()) != n)
    throw input_error("composed action profile length mismatch");
  for (const auto& a : actions)
    if (a.size() != m) throw input_error("each agent needs one action per component");

  Outcome out;
  out.allocation.assign(n, 0.0);
  out.payments.assign(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    BidProfile bids(n, 0.0);
    std::vector<char> present(n, 0);
    for (int i = 0; i < n; ++i) {
      if (actions[i][j].has_value()) {
        bids[i] = *actions[i][j];
        present[i] = 1;
      }
    }
    Outcome sub = run(mech.components[j], bids, present);
    for (int i = 0; i < n; ++i) {
      out.allocation[i] = std::max(out.allocation[i], sub.allocation[i]);
      out.payments[i] += sub.payments[i];
    }
  }
  return out;
}

}  // namespace rae
