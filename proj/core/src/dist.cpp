#include "rae/dist.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace rae {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

constexpr double kMergeTol = 1e-12;

}  // namespace

ValueDistribution ValueDistribution::uniform(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, "uniform needs a < b");
  require(a >= 0.0, "values must be nonnegative");
  ValueDistribution d;
  d.kind_ = DistKind::Uniform;
  d.a_ = a;
  d.b_ = b;
  return d;
}

ValueDistribution ValueDistribution::equal_revenue(double H, double eps) {
  require(H > 1.0, "equal-revenue truncation H must exceed 1");
  require(eps >= 0.0, "perturbation must be >= 0");
  ValueDistribution d;
  d.kind_ = DistKind::EqualRevenue;
  d.a_ = 1.0;
  d.b_ = H;
  d.eps_ = eps;
  return d;
}

ValueDistribution ValueDistribution::example_cor() {
  ValueDistribution d;
  d.kind_ = DistKind::ExampleCor;
  d.a_ = 0.0;
  d.b_ = 1.0 - 1.0 / kE;
  return d;
}

ValueDistribution ValueDistribution::degenerate(double v) {
  require(std::isfinite(v) && v >= 0.0, "point mass must be finite and >= 0");
  ValueDistribution d;
  d.kind_ = DistKind::Degenerate;
  d.a_ = d.b_ = v;
  d.atoms_ = {{v, 1.0}};
  return d;
}

ValueDistribution ValueDistribution::discrete(std::vector<Atom> atoms) {
  require(!atoms.empty(), "discrete distribution needs atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.value < y.value; });
  // merge equal values
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    require(std::isfinite(a.value) && a.value >= 0.0, "atom values must be >= 0");
    require(a.mass > 0.0, "atom masses must be positive");
    if (!merged.empty() && std::fabs(merged.back().value - a.value) <= kMergeTol)
      merged.back().mass += a.mass;
    else
      merged.push_back(a);
  }
  double total = 0.0;
  for (const Atom& a : merged) total += a.mass;
  require(std::fabs(total - 1.0) <= 1e-12, "atom masses must sum to 1");
  ValueDistribution d;
  d.kind_ = DistKind::Discrete;
  d.a_ = merged.front().value;
  d.b_ = merged.back().value;
  d.atoms_ = std::move(merged);
  return d;
}

double ValueDistribution::cdf(double v) const {
  switch (kind_) {
    case DistKind::Uniform:
      if (v < a_) return 0.0;
      if (v >= b_) return 1.0;
      return (v - a_) / (b_ - a_);
    case DistKind::EqualRevenue:
      if (v < 1.0) return 0.0;
      if (v >= b_) return 1.0;
      return 1.0 - std::pow(v, -(1.0 + eps_));
    case DistKind::ExampleCor:
      if (v < 0.0) return 0.0;
      if (v >= b_) return 1.0;
      return 1.0 / (kE * (1.0 - v));
    case DistKind::Degenerate:
      return v >= a_ ? 1.0 : 0.0;
    case DistKind::Discrete: {
      double acc = 0.0;
      for (const Atom& a : atoms_)
        if (a.value <= v + kMergeTol) acc += a.mass;
      return std::min(acc, 1.0);
    }
  }
  return 0.0;
}

double ValueDistribution::density(double v) const {
  switch (kind_) {
    case DistKind::Uniform:
      return (v >= a_ && v <= b_) ? 1.0 / (b_ - a_) : 0.0;
    case DistKind::EqualRevenue:
      if (v < 1.0 || v >= b_) return 0.0;
      return (1.0 + eps_) * std::pow(v, -(2.0 + eps_));
    case DistKind::ExampleCor:
      if (v <= 0.0 || v > b_) return 0.0;
      return 1.0 / (kE * (1.0 - v) * (1.0 - v));
    case DistKind::Degenerate:
    case DistKind::Discrete:
      throw input_error("density undefined for purely atomic distributions");
  }
  return 0.0;
}

double ValueDistribution::quantile(double q) const {
  require(q >= 0.0 && q <= 1.0, "quantile argument must lie in [0,1]");
  switch (kind_) {
    case DistKind::Uniform:
      return a_ + q * (b_ - a_);
    case DistKind::EqualRevenue: {
      double cont_top = 1.0 - std::pow(b_, -(1.0 + eps_));
      if (q >= cont_top) return b_;
      return std::pow(1.0 - q, -1.0 / (1.0 + eps_));
    }
    case DistKind::ExampleCor:
      if (q <= 1.0 / kE) return 0.0;
      return 1.0 - 1.0 / (kE * q);
    case DistKind::Degenerate:
      return a_;
    case DistKind::Discrete: {
      double acc = 0.0;
      for (const Atom& a : atoms_) {
        acc += a.mass;
        if (acc >= q - kMergeTol) return a.value;
      }
      return atoms_.back().value;
    }
  }
  return 0.0;
}

double ValueDistribution::sample(Rng& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return quantile(u(rng));
}

double ValueDistribution::mean() const {
  switch (kind_) {
    case DistKind::Uniform:
      return 0.5 * (a_ + b_);
    case DistKind::EqualRevenue: {
      double top_mass = std::pow(b_, -(1.0 + eps_));
      double cont;
      if (eps_ == 0.0)
        cont = std::log(b_);
      else
        cont = (1.0 + eps_) / eps_ * (1.0 - std::pow(b_, -eps_));
      return cont + b_ * top_mass;
    }
    case DistKind::ExampleCor:
      return (kE - 2.0) / kE;
    case DistKind::Degenerate:
      return a_;
    case DistKind::Discrete: {
      double m = 0.0;
      for (const Atom& a : atoms_) m += a.value * a.mass;
      return m;
    }
  }
  return 0.0;
}

double ValueDistribution::support_lo() const { return a_; }
double ValueDistribution::support_hi() const { return b_; }

std::vector<Atom> ValueDistribution::atoms() const {
  switch (kind_) {
    case DistKind::Uniform:
      return {};
    case DistKind::EqualRevenue:
      return {{b_, std::pow(b_, -(1.0 + eps_))}};
    case DistKind::ExampleCor:
      return {{0.0, 1.0 / kE}};
    case DistKind::Degenerate:
    case DistKind::Discrete:
      return atoms_;
  }
  return {};
}

bool ValueDistribution::has_atom_at(double v) const {
  for (const Atom& a : atoms())
    if (std::fabs(a.value - v) <= kMergeTol) return true;
  return false;
}

const std::vector<Atom>& ValueDistribution::discrete_atoms() const {
  require(kind_ == DistKind::Discrete || kind_ == DistKind::Degenerate,
          "discrete_atoms(): not a discrete distribution");
  return atoms_;
}

double virtual_value(const ValueDistribution& F, double v) {
  if (F.has_atom_at(v))
    throw input_error("virtual value undefined at an atom");
  switch (F.kind()) {
    case DistKind::Uniform: {
      if (v < F.param_a() || v > F.param_b())
        throw input_error("virtual value outside the support");
      return 2.0 * v - F.param_b();
    }
    case DistKind::EqualRevenue: {
      if (v < 1.0 || v >= F.param_b())
        throw input_error("virtual value outside the continuous support");
      return v * F.param_eps() / (1.0 + F.param_eps());
    }
    case DistKind::ExampleCor: {
      if (v <= 0.0 || v > F.support_hi())
        throw input_error("virtual value outside the continuous support");
      return v - (1.0 - v) * (kE * (1.0 - v) - 1.0);
    }
    case DistKind::Degenerate:
    case DistKind::Discrete:
      throw input_error("virtual value undefined at an atom");
  }
  return 0.0;
}

double monopoly_reserve(const ValueDistribution& F) {
  if (F.kind() == DistKind::Degenerate) return F.support_lo();
  if (F.kind() == DistKind::Discrete)
    throw input_error("monopoly reserve needs a regular (atomless-part) distribution");

  // Regularity check on the continuous part.
  double lo = F.support_lo();
  double hi = F.support_hi();
  if (F.kind() == DistKind::ExampleCor) lo = 0.0;  // atom sits at the bottom
  const int kGrid = 10000;
  double span = hi - lo;
  double prev = -kInf;
  double prev_v = lo;
  for (int g = 1; g < kGrid; ++g) {
    double v = lo + span * g / kGrid;
    if (F.has_atom_at(v)) continue;
    double phi;
    try {
      phi = virtual_value(F, v);
    } catch (const input_error&) {
      continue;
    }
    if (phi < prev - 1e-9) {
      std::ostringstream os;
      os << "distribution is not regular: phi(" << prev_v << ") = " << prev << " > phi("
         << v << ") = " << phi;
      throw input_error(os.str());
    }
    prev = phi;
    prev_v = v;
  }

  // inf{v : phi(v) >= 0} by bisection to 1e-9.
  auto phi_at = [&](double v) { return virtual_value(F, v); };
  double eps_in = span * 1e-12;
  double a = lo + eps_in, b = hi - eps_in;
  if (phi_at(a) >= 0.0) return lo;
  if (phi_at(b) < 0.0) return hi;
  while (b - a > 1e-9) {
    double m = 0.5 * (a + b);
    if (phi_at(m) >= 0.0)
      b = m;
    else
      a = m;
  }
  return 0.5 * (a + b);
}

namespace {

struct VirtualNode {
  double mass;
  double virt;  // already the posted-price value for atoms
};

std::vector<VirtualNode> virtual_nodes(const ValueDistribution& F, int n_cont) {
  std::vector<VirtualNode> nodes;
  switch (F.kind()) {
    case DistKind::Degenerate:
      nodes.push_back({1.0, F.support_lo()});
      return nodes;
    case DistKind::Discrete: {
      // Discrete Myerson virtual values; requires monotonicity (no ironing).
      const auto& atoms = F.discrete_atoms();
      double tail = 1.0;
      double prev = -kInf;
      for (std::size_t j = 0; j < atoms.size(); ++j) {
        tail -= atoms[j].mass;
        double phi = j + 1 < atoms.size()
                         ? atoms[j].value -
                               tail * (atoms[j + 1].value - atoms[j].value) / atoms[j].mass
                         : atoms[j].value;
        if (phi < prev - 1e-9)
          throw input_error("discrete distribution needs ironing; not supported");
        prev = phi;
        nodes.push_back({atoms[j].mass, phi});
      }
      return nodes;
    }
    case DistKind::Uniform: {
      for (int j = 0; j < n_cont; ++j) {
        double q = (j + 0.5) / n_cont;
        nodes.push_back({1.0 / n_cont, virtual_value(F, F.quantile(q))});
      }
      return nodes;
    }
    case DistKind::EqualRevenue: {
      double top_mass = std::pow(F.param_b(), -(1.0 + F.param_eps()));
      double cont_mass = 1.0 - top_mass;
      for (int j = 0; j < n_cont; ++j) {
        double q = cont_mass * (j + 0.5) / n_cont;
        nodes.push_back({cont_mass / n_cont, virtual_value(F, F.quantile(q))});
      }
      nodes.push_back({top_mass, F.param_b()});  // top atom = posted price H
      return nodes;
    }
    case DistKind::ExampleCor:
      throw input_error("revenue machinery does not support this distribution");
  }
  return nodes;
}

}  // namespace

double myerson_optimal_revenue(const Environment& env,
                               const std::vector<ValueDistribution>& Fs,
                               const MyersonOptions& opts) {
  require(static_cast<int>(Fs.size()) == env.agents(),
          "one value distribution per agent required");
  std::vector<std::vector<VirtualNode>> nodes;
  std::size_t combos = 1;
  for (const auto& F : Fs) {
    nodes.push_back(virtual_nodes(F, opts.nodes_per_agent));
    combos *= nodes.back().size();
    if (combos > opts.budget)
      throw budget_error("myerson product quadrature exceeds budget");
  }

  const int n = env.agents();
  std::vector<std::size_t> pick(n, 0);
  Weights w(n, 0.0);
  double total = 0.0;
  while (true) {
    double mass = 1.0;
    for (int i = 0; i < n; ++i) {
      const VirtualNode& nd = nodes[i][pick[i]];
      mass *= nd.mass;
      w[i] = std::max(nd.virt, 0.0);
    }
    total += mass * max_weight_feasible(env, w).total;
    int c = 0;
    while (c < n && ++pick[c] == nodes[c].size()) {
      pick[c] = 0;
      ++c;
    }
    if (c == n) break;
  }
  return total;
}

ValueDistribution discretize(const ValueDistribution& F, int grid_size) {
  require(grid_size >= 2, "grid size must be at least 2");
  std::vector<Atom> kept = F.atoms();
  double atom_mass = 0.0;
  for (const Atom& a : kept) atom_mass += a.mass;
  if (atom_mass >= 1.0 - kMergeTol) return F;  // purely atomic: unchanged

  // Continuous quantile ranges per kind.
  std::vector<std::pair<double, double>> ranges;
  switch (F.kind()) {
    case DistKind::Uniform:
      ranges.push_back({0.0, 1.0});
      break;
    case DistKind::EqualRevenue:
      ranges.push_back({0.0, 1.0 - std::pow(F.param_b(), -(1.0 + F.param_eps()))});
      break;
    case DistKind::ExampleCor:
      ranges.push_back({1.0 / kE, 1.0});
      break;
    default:
      break;
  }
  std::vector<Atom> atoms = kept;
  for (auto [qa, qb] : ranges) {
    for (int j = 0; j < grid_size; ++j) {
      double q = qa + (qb - qa) * (j + 0.5) / grid_size;
      atoms.push_back({F.quantile(q), (qb - qa) / grid_size});
    }
  }
  return ValueDistribution::discrete(std::move(atoms));
}

JointScenario::JointScenario(std::vector<Scenario> table) : table_(std::move(table)) {
  require(!table_.empty(), "joint scenario needs at least one row");
  n_ = static_cast<int>(table_.front().values.size());
  double total = 0.0;
  for (const Scenario& s : table_) {
    require(s.weight > 0.0, "scenario weights must be positive");
    require(static_cast<int>(s.values.size()) == n_ &&
                static_cast<int>(s.actions.size()) == n_,
            "scenario profile lengths must match");
    total += s.weight;
  }
  require(std::fabs(total - 1.0) <= 1e-9, "scenario weights must sum to 1");
  // Remove the accumulated rounding so expectations sum against exactly 1.
  for (Scenario& s : table_) s.weight /= total;
}

namespace {

// Key helper: merge doubles within 1e-12 by quantizing through a sorted list.
int find_index(std::vector<double>& sorted_vals, double v) {
  for (std::size_t k = 0; k < sorted_vals.size(); ++k)
    if (std::fabs(sorted_vals[k] - v) <= kMergeTol) return static_cast<int>(k);
  sorted_vals.push_back(v);
  return static_cast<int>(sorted_vals.size()) - 1;
}

}  // namespace

bool JointScenario::independent_values(double tol) const {
  // Build marginals and the joint over value profiles.
  std::vector<std::vector<double>> vals(n_);
  std::vector<std::vector<double>> marg(n_);
  std::map<std::vector<int>, double> joint;
  for (const Scenario& s : table_) {
    std::vector<int> key(n_);
    for (int i = 0; i < n_; ++i) {
      key[i] = find_index(vals[i], s.values[i]);
      if (key[i] >= static_cast<int>(marg[i].size())) marg[i].push_back(0.0);
      marg[i][key[i]] += s.weight;
    }
    joint[key] += s.weight;
  }
  // Check the product formula over the whole product support.
  std::vector<std::size_t> pick(n_, 0);
  while (true) {
    double prod = 1.0;
    std::vector<int> key(n_);
    for (int i = 0; i < n_; ++i) {
      key[i] = static_cast<int>(pick[i]);
      prod *= marg[i][pick[i]];
    }
    auto it = joint.find(key);
    double p = it == joint.end() ? 0.0 : it->second;
    if (std::fabs(p - prod) > tol) return false;
    int c = 0;
    while (c < n_ && ++pick[c] == vals[c].size()) {
      pick[c] = 0;
      ++c;
    }
    if (c == n_) break;
  }
  return true;
}

bool JointScenario::no_bidder_communication(double tol) const {
  for (int i = 0; i < n_; ++i) {
    // Group scenarios by v_i; within a group, the conditional action law of
    // agent i must not depend on v_{-i}.
    std::vector<double> vi_vals;
    // maps: vi index -> (v_{-i} key -> (action -> mass)), plus totals.
    std::map<int, std::map<std::vector<int>, std::map<int, double>>> cond;
    std::map<int, std::map<std::vector<int>, double>> cond_total;
    std::vector<double> other_vals;  // shared value pool for v_{-i} keys
    std::vector<double> act_vals;
    for (const Scenario& s : table_) {
      int vi = find_index(vi_vals, s.values[i]);
      std::vector<int> others;
      for (int j = 0; j < n_; ++j)
        if (j != i) others.push_back(find_index(other_vals, s.values[j]));
      int act = find_index(act_vals, s.actions[i]);
      cond[vi][others][act] += s.weight;
      cond_total[vi][others] += s.weight;
    }
    for (auto& [vi, by_others] : cond) {
      // Reference distribution: the first group.
      auto ref_it = by_others.begin();
      double ref_total = cond_total[vi][ref_it->first];
      for (auto it = by_others.begin(); it != by_others.end(); ++it) {
        double tot = cond_total[vi][it->first];
        // Compare action distributions in total variation.
        std::map<int, double> all_acts = ref_it->second;
        for (auto& [a, m] : it->second) all_acts.emplace(a, 0.0);
        for (auto& [a, unused] : all_acts) {
          double p_ref = 0.0, p_cur = 0.0;
          auto f = ref_it->second.find(a);
          if (f != ref_it->second.end()) p_ref = f->second / ref_total;
          auto g = it->second.find(a);
          if (g != it->second.end()) p_cur = g->second / tot;
          if (std::fabs(p_ref - p_cur) > tol) return false;
        }
      }
    }
  }
  return true;
}

std::vector<double> JointScenario::value_support(int i) const {
  std::vector<double> vals;
  for (const Scenario& s : table_) find_index(vals, s.values[i]);
  std::sort(vals.begin(), vals.end());
  return vals;
}

double JointScenario::value_mass(int i, double v) const {
  double m = 0.0;
  for (const Scenario& s : table_)
    if (std::fabs(s.values[i] - v) <= kMergeTol) m += s.weight;
  return m;
}

std::vector<Scenario> JointScenario::conditional(int i, double v) const {
  double m = value_mass(i, v);
  if (m <= 0.0) throw input_error("value not in the agent's support");
  std::vector<Scenario> out;
  for (const Scenario& s : table_) {
    if (std::fabs(s.values[i] - v) <= kMergeTol) {
      Scenario c = s;
      c.weight = s.weight / m;
      out.push_back(std::move(c));
    }
  }
  return out;
}

JointScenario product_scenario(
    const std::vector<std::vector<std::pair<double, std::pair<double, double>>>>& per_agent) {
  require(!per_agent.empty(), "product scenario needs agents");
  const int n = static_cast<int>(per_agent.size());
  std::vector<std::size_t> pick(n, 0);
  std::vector<Scenario> table;
  while (true) {
    Scenario s;
    s.weight = 1.0;
    s.values.resize(n);
    s.actions.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto& [w, va] = per_agent[i][pick[i]];
      s.weight *= w;
      s.values[i] = va.first;
      s.actions[i] = va.second;
    }
    if (s.weight > 0.0) table.push_back(std::move(s));
    int c = 0;
    while (c < n && ++pick[c] == per_agent[c].size()) {
      pick[c] = 0;
      ++c;
    }
    if (c == n) break;
  }
  return JointScenario(std::move(table));
}

}  // namespace rae
