#include "rae/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "rae/eff.hpp"
#include "rae/eq.hpp"

namespace rae {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw input_error(msg);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == ':' || c == '.' || c == '/' || c == '=';
}

// Recursive-descent value parser over s starting at pos.
ConfigValue parse_value(const std::string& s, std::size_t& pos);

std::vector<ConfigValue> parse_items(const std::string& s, std::size_t& pos, char close) {
  std::vector<ConfigValue> items;
  while (true) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    require(pos < s.size(), "unterminated bracket in config value");
    if (s[pos] == close) {
      ++pos;
      return items;
    }
    items.push_back(parse_value(s, pos));
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    require(pos < s.size(), "unterminated bracket in config value");
    if (s[pos] == ',') {
      ++pos;
    } else {
      require(s[pos] == close, std::string("expected ',' or '") + close + "' in config value");
    }
  }
}

ConfigValue parse_value(const std::string& s, std::size_t& pos) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  require(pos < s.size(), "empty config value");
  char c = s[pos];
  ConfigValue v;
  if (c == '[' || c == '(' || c == '{') {
    char close = c == '[' ? ']' : (c == '(' ? ')' : '}');
    v.type = c == '[' ? ConfigValue::Type::List
                      : (c == '(' ? ConfigValue::Type::Tuple : ConfigValue::Type::Set);
    ++pos;
    v.items = parse_items(s, pos, close);
    return v;
  }
  if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
    const char* start = s.c_str() + pos;
    char* end = nullptr;
    double x = std::strtod(start, &end);
    require(end != start, "malformed number in config value");
    pos += static_cast<std::size_t>(end - start);
    v.type = ConfigValue::Type::Number;
    v.num = x;
    return v;
  }
  require(std::isalpha(static_cast<unsigned char>(c)), "malformed config value");
  // Bare word, possibly a call literal with balanced (...) or [...].
  std::size_t start = pos;
  int depth = 0;
  while (pos < s.size()) {
    char ch = s[pos];
    if (ch == '(' || ch == '[') {
      ++depth;
      ++pos;
    } else if (ch == ')' || ch == ']') {
      if (depth == 0) break;
      --depth;
      ++pos;
    } else if (depth > 0) {
      ++pos;
    } else if (word_char(ch)) {
      ++pos;
    } else {
      break;
    }
  }
  require(depth == 0, "unbalanced brackets in config literal");
  v.type = ConfigValue::Type::String;
  v.str = s.substr(start, pos - start);
  return v;
}

}  // namespace

ConfigValue ConfigValue::number(double x) {
  ConfigValue v;
  v.type = Type::Number;
  v.num = x;
  return v;
}

ConfigValue ConfigValue::word(std::string s) {
  ConfigValue v;
  v.type = Type::String;
  v.str = std::move(s);
  return v;
}

bool ConfigValue::operator==(const ConfigValue& o) const {
  if (type != o.type) return false;
  switch (type) {
    case Type::Number:
      return num == o.num;
    case Type::String:
      return str == o.str;
    default:
      return items == o.items;
  }
}

std::string ConfigValue::serialize() const {
  switch (type) {
    case Type::Number: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", num);
      return buf;
    }
    case Type::String:
      return str;
    case Type::List:
    case Type::Tuple:
    case Type::Set: {
      std::string open = type == Type::List ? "[" : (type == Type::Tuple ? "(" : "{");
      std::string close = type == Type::List ? "]" : (type == Type::Tuple ? ")" : "}");
      std::string out = open;
      for (std::size_t j = 0; j < items.size(); ++j) {
        if (j) out += ", ";
        out += items[j].serialize();
      }
      return out + close;
    }
  }
  return "";
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config line " << line_no << ": expected key = value";
      throw input_error(os.str());
    }
    std::string key = trim(line.substr(0, eq));
    std::string rest = trim(line.substr(eq + 1));
    if (key.empty() || rest.empty()) {
      std::ostringstream os;
      os << "config line " << line_no << ": empty key or value";
      throw input_error(os.str());
    }
    std::size_t pos = 0;
    ConfigValue v;
    try {
      v = parse_value(rest, pos);
    } catch (const input_error& e) {
      std::ostringstream os;
      os << "config line " << line_no << " (key " << key << "): " << e.what();
      throw input_error(os.str());
    }
    if (trim(rest.substr(pos)) != "") {
      std::ostringstream os;
      os << "config line " << line_no << " (key " << key << "): trailing characters";
      throw input_error(os.str());
    }
    cfg.set(key, std::move(v));
  }
  return cfg;
}

ScenarioConfig ScenarioConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ScenarioConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v.serialize() + "\n";
  return out;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return entries_ == o.entries_;
}

void ScenarioConfig::set(const std::string& key, ConfigValue v) {
  for (auto& [k, val] : entries_) {
    if (k == key) {
      val = std::move(v);
      return;
    }
  }
  entries_.emplace_back(key, std::move(v));
}

const ConfigValue* ScenarioConfig::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

double ScenarioConfig::number(const std::string& key) const {
  const ConfigValue* v = find(key);
  require(v != nullptr, "missing config key: " + key);
  require(v->type == ConfigValue::Type::Number, "config key " + key + " must be a number");
  return v->num;
}

double ScenarioConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string ScenarioConfig::word(const std::string& key) const {
  const ConfigValue* v = find(key);
  require(v != nullptr, "missing config key: " + key);
  require(v->type == ConfigValue::Type::String, "config key " + key + " must be a word");
  return v->str;
}

std::string ScenarioConfig::word_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? word(key) : fallback;
}

std::vector<double> ScenarioConfig::number_list(const std::string& key) const {
  const ConfigValue* v = find(key);
  require(v != nullptr, "missing config key: " + key);
  require(v->type == ConfigValue::Type::List, "config key " + key + " must be a list");
  std::vector<double> out;
  for (const ConfigValue& item : v->items) {
    require(item.type == ConfigValue::Type::Number, "config key " + key + " must list numbers");
    out.push_back(item.num);
  }
  return out;
}

ValueDistribution parse_dist_literal(const std::string& literal) {
  std::string s = trim(literal);
  auto args_of = [&](std::size_t open, char close) {
    require(s.back() == close, "malformed distribution literal: " + literal);
    return s.substr(open + 1, s.size() - open - 2);
  };
  if (s == "examplecor") return ValueDistribution::example_cor();
  if (s.rfind("uniform(", 0) == 0) {
    double a, b;
    require(std::sscanf(s.c_str(), "uniform(%lf,%lf)", &a, &b) == 2,
            "malformed distribution literal: " + literal);
    return ValueDistribution::uniform(a, b);
  }
  if (s.rfind("equalrev(", 0) == 0) {
    std::string args = args_of(8, ')');
    double H = 100.0, eps = 0.0;
    for (std::size_t start = 0; start < args.size();) {
      std::size_t comma = args.find(',', start);
      std::string part = trim(args.substr(start, comma - start));
      if (std::sscanf(part.c_str(), "H=%lf", &H) == 1) {
      } else if (std::sscanf(part.c_str(), "eps=%lf", &eps) == 1) {
      } else {
        require(std::sscanf(part.c_str(), "%lf", &H) == 1,
                "malformed distribution literal: " + literal);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return ValueDistribution::equal_revenue(H, eps);
  }
  if (s.rfind("point(", 0) == 0) {
    double v;
    require(std::sscanf(s.c_str(), "point(%lf)", &v) == 1,
            "malformed distribution literal: " + literal);
    return ValueDistribution::degenerate(v);
  }
  if (s.rfind("discrete[", 0) == 0) {
    std::string args = args_of(8, ']');
    std::size_t pos = 0;
    std::vector<Atom> atoms;
    while (pos < args.size()) {
      while (pos < args.size() && (args[pos] == ',' || std::isspace(static_cast<unsigned char>(args[pos])))) ++pos;
      if (pos >= args.size()) break;
      double v, p;
      int consumed = 0;
      require(std::sscanf(args.c_str() + pos, "(%lf,%lf)%n", &v, &p, &consumed) == 2,
              "malformed distribution literal: " + literal);
      atoms.push_back({v, p});
      pos += static_cast<std::size_t>(consumed);
    }
    return ValueDistribution::discrete(std::move(atoms));
  }
  throw input_error("unknown distribution literal: " + literal);
}

namespace {

const std::set<std::string> kKnownKeys = {
    "name",        "n",            "env.kind",     "env.k",         "env.m",
    "env.demands", "env.items",    "env.weights",  "env.caps",      "mech.rule",
    "mech.format", "mech.reserves", "mech.tiebreak", "strategy",     "strategy.start",
    "analyses",    "grid.bids",    "grid.max_bid", "grid.z",        "disc",
    "tol",         "seed",         "budget",       "out",           "values",
    "outcome.v",   "outcome.bids", "outcome.rules", "outcome.weights",
    "outcome.format", "compose.copies", "compose.scenarios", "mu",  "eta",
    "samples",
};

bool known_key(const std::string& k) {
  if (kKnownKeys.count(k)) return true;
  // per-agent keys: dist.<i>, strategy.table.<i>
  if (k.rfind("dist.", 0) == 0) return true;
  if (k.rfind("strategy.table.", 0) == 0) return true;
  return false;
}

std::vector<int> int_list(const ScenarioConfig& cfg, const std::string& key) {
  std::vector<int> out;
  for (double x : cfg.number_list(key)) out.push_back(static_cast<int>(std::llround(x)));
  return out;
}

std::vector<std::vector<int>> set_list(const ScenarioConfig& cfg, const std::string& key) {
  const ConfigValue* v = cfg.find(key);
  require(v && v->type == ConfigValue::Type::List, "config key " + key + " must be a list of sets");
  std::vector<std::vector<int>> out;
  for (const ConfigValue& item : v->items) {
    require(item.type == ConfigValue::Type::Set, "config key " + key + " must list {..} sets");
    std::vector<int> set;
    for (const ConfigValue& x : item.items) {
      require(x.type == ConfigValue::Type::Number, "set items must be numbers");
      set.push_back(static_cast<int>(std::llround(x.num)) - 1);  // configs are 1-based
    }
    out.push_back(std::move(set));
  }
  return out;
}

Environment build_env(const ScenarioConfig& cfg) {
  std::string kind = cfg.word("env.kind");
  int n = static_cast<int>(cfg.number_or("n", 0));
  if (kind == "single_item") return Environment::single_item(n);
  if (kind == "kunit") return Environment::k_unit(n, static_cast<int>(cfg.number("env.k")));
  if (kind == "matroid")
    return Environment::transversal_matroid(static_cast<int>(cfg.number("env.m")),
                                            set_list(cfg, "env.items"));
  if (kind == "ca")
    return Environment::single_minded_ca(static_cast<int>(cfg.number("env.m")),
                                         set_list(cfg, "env.demands"));
  if (kind == "position") return Environment::position(cfg.number_list("env.weights"));
  if (kind == "partial") return Environment::partial_allocation(cfg.number_list("env.caps"));
  throw input_error("unknown env.kind: " + kind);
}

TieBreakPolicy build_tiebreak(const ScenarioConfig& cfg, int n) {
  if (!cfg.has("mech.tiebreak")) return TieBreakPolicy::identity(n);
  std::vector<int> order = int_list(cfg, "mech.tiebreak");
  for (int& a : order) a -= 1;  // configs are 1-based
  return TieBreakPolicy::from_order(std::move(order));
}

Mechanism build_mech(const ScenarioConfig& cfg, const Environment& env) {
  TieBreakPolicy tie = build_tiebreak(cfg, env.agents());
  std::string rule_name = cfg.word_or("mech.rule", "hbw");
  AllocationRule rule = [&] {
    if (rule_name == "hbw") return AllocationRule::highest_bids_win(env, tie);
    if (rule_name == "greedy")
      return AllocationRule::greedy(env, PriorityFamily::Identity, tie);
    if (rule_name == "greedy_sqrt")
      return AllocationRule::greedy(env, PriorityFamily::BidOverSqrtDemand, tie);
    if (rule_name == "rank_by_bid") return AllocationRule::rank_by_bid(env, tie);
    if (rule_name == "pa_hbw") return AllocationRule::partial_allocation_hbw(env, tie);
    throw input_error("unknown mech.rule: " + rule_name);
  }();
  std::vector<double> reserves;
  if (cfg.has("mech.reserves")) reserves = cfg.number_list("mech.reserves");
  std::string format = cfg.word_or("mech.format", "wpb");
  if (format == "wpb") return winner_pays_bid(std::move(rule), std::move(reserves));
  if (format == "allpay") return all_pay(std::move(rule), std::move(reserves));
  throw input_error("unknown mech.format: " + format);
}

BidGrid build_grid(const ScenarioConfig& cfg) {
  BidGrid grid;
  grid.points = static_cast<int>(cfg.number_or("grid.bids", 101));
  grid.max_bid = cfg.number_or("grid.max_bid", 1.0);
  return grid;
}

InterimRule parse_rule_literal(const ConfigValue& v) {
  if (v.type == ConfigValue::Type::String) {
    if (v.str == "ershape") return InterimRule::er_shape();
    if (v.str == "linear") return InterimRule::linear_bid();
    if (v.str.rfind("step[", 0) == 0) {
      // step[(b,level),...] captured verbatim
      std::vector<std::pair<double, double>> pts;
      std::size_t pos = 5;
      while (pos < v.str.size() && v.str[pos] != ']') {
        double b, l;
        int consumed = 0;
        if (std::sscanf(v.str.c_str() + pos, "(%lf,%lf)%n", &b, &l, &consumed) == 2) {
          pts.emplace_back(b, l);
          pos += static_cast<std::size_t>(consumed);
        } else {
          ++pos;
        }
      }
      return InterimRule::step(StepFunction::from_breakpoints(std::move(pts)));
    }
  }
  throw input_error("unknown interim rule literal");
}

BiddingOutcome build_outcome(const ScenarioConfig& cfg) {
  BiddingOutcome outcome;
  outcome.v = cfg.number("outcome.v");
  std::vector<double> bids = cfg.number_list("outcome.bids");
  const ConfigValue* rules = cfg.find("outcome.rules");
  require(rules && rules->type == ConfigValue::Type::List,
          "outcome.rules must be a list of rule literals");
  require(rules->items.size() == bids.size(), "outcome.bids and outcome.rules sizes differ");
  std::vector<double> weights(bids.size(), 1.0 / bids.size());
  if (cfg.has("outcome.weights")) weights = cfg.number_list("outcome.weights");
  require(weights.size() == bids.size(), "outcome.weights size mismatch");
  PaymentFormat fmt = cfg.word_or("outcome.format", "wpb") == "allpay"
                          ? PaymentFormat::AllPay
                          : PaymentFormat::WinnerPaysBid;
  for (std::size_t j = 0; j < bids.size(); ++j)
    outcome.scenarios.push_back({weights[j], bids[j], parse_rule_literal(rules->items[j]), fmt});
  return outcome;
}

void run_canonical(const std::string& name, int disc, ReportBundle& bundle) {
  CanonicalExample ex = canonical_example(name, disc);
  if (name == "cor-welfare") {
    double welfare = ex.expected.at("welfare");
    double opt = ex.expected.at("opt_welfare");
    bundle.add_checked("welfare", welfare, (kE - 1.0) / kE, 1e-6, name);
    double eta = individual_efficiency(*ex.tight_outcome).eta;
    bundle.add_checked("eta", eta, ex.expected.at("eta"), 1e-6, name);
    BoundReport bound = welfare_bound_values(welfare, opt, ex.expected.at("mu"), eta);
    bundle.add_flag("welfare_bound", bound.pass, name);
    bundle.add_checked("bound_slack", bound.slack, 0.0, 1e-6, name);
    double disc_welfare = expected_welfare(ex.mech, ex.joint);
    bundle.add_checked("welfare_discretized", disc_welfare, welfare, 1e-3, name);
    return;
  }
  if (name == "rev-half") {
    double revenue = expected_revenue(ex.mech, ex.joint);
    bundle.add_checked("revenue", revenue, ex.expected.at("revenue"), 1e-12, name);
    double opt = myerson_optimal_revenue(ex.env, ex.value_dists);
    bundle.add_checked("myerson_revenue", opt, ex.expected.at("myerson_revenue"), 1e-9, name);
    bundle.add_checked("revenue_ratio", revenue / opt, 0.50251, 1e-4, name);
    BoundReport bound = revenue_bound_report(ex.mech, ex.joint, ex.value_dists,
                                             ex.expected.at("mu"));
    bundle.add_flag("revenue_bound", bound.pass, name);
    return;
  }
  if (name == "partial-alloc") {
    double welfare = expected_welfare(ex.mech, ex.joint);
    bundle.add_checked("welfare_discretized", welfare, ex.expected.at("welfare"), 1e-3, name);
    // Competitive efficiency at sampled profiles, the equilibrium included.
    std::vector<BidProfile> profiles{{1.0, 1.0, 0.0}, {0.5, 0.5, 0.0}, {0.7, 0.7, 0.7}};
    Rng rng(412);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 20; ++s) profiles.push_back({u(rng), u(rng), u(rng)});
    CEReport ce = ce_over_profiles(ex.mech, profiles, false);
    bundle.add_checked("mu_hat_sampled", ce.mu_hat, 1.0, 1e-9, name);
    return;
  }
  throw input_error("unknown canonical example: " + name);
}

}  // namespace

ReportBundle run_scenario(const ScenarioConfig& cfg) {
  for (const auto& [k, v] : cfg.entries())
    require(known_key(k), "unknown config key: " + k);

  ReportBundle bundle;
  std::string source = cfg.word_or("name", "scenario");
  std::uint64_t seed = static_cast<std::uint64_t>(cfg.number_or("seed", 20240501));

  std::vector<std::string> analyses;
  if (const ConfigValue* v = cfg.find("analyses")) {
    require(v->type == ConfigValue::Type::List, "analyses must be a list");
    for (const ConfigValue& a : v->items) {
      require(a.type == ConfigValue::Type::String, "analyses must list words");
      analyses.push_back(a.str);
    }
  }
  require(!analyses.empty(), "analyses list is empty");

  std::string strategy = cfg.word_or("strategy", "");
  int disc = static_cast<int>(cfg.number_or("disc", 10000));

  for (const std::string& analysis : analyses) {
    if (analysis == "examples") {
      require(strategy.rfind("canonical:", 0) == 0,
              "examples analysis needs strategy = canonical:<name>");
      run_canonical(strategy.substr(10), disc, bundle);
      continue;
    }
    if (analysis == "ce") {
      Environment env = build_env(cfg);
      Mechanism mech = build_mech(cfg, env);
      CEOptions opts;
      opts.seed = seed;
      if (cfg.has("budget")) opts.exhaustive_budget = static_cast<std::size_t>(cfg.number("budget"));
      if (cfg.has("samples")) opts.samples = static_cast<int>(cfg.number("samples"));
      CEReport report = ce_deterministic(mech, build_grid(cfg), opts);
      bundle.add("mu_hat", report.mu_hat, source);
      bundle.add_flag(report.exhaustive ? "ce_exhaustive" : "ce_sampled_upper_bound", true,
                      source);
      CurveFile witness{"witness", "agent,bid,threshold,y", {}};
      for (std::size_t i = 0; i < report.witness.bids.size(); ++i)
        witness.rows.push_back({static_cast<double>(i + 1), report.witness.bids[i],
                                report.witness.thresholds[i], report.witness.y[i]});
      bundle.curves.push_back(std::move(witness));
      continue;
    }
    if (analysis == "ie") {
      BiddingOutcome outcome = build_outcome(cfg);
      IEReport report = individual_efficiency(outcome);
      bundle.add("eta", report.eta, source);
      bundle.add("z_star", report.z_star, source);
      bundle.add("utility", report.u, source);
      CurveFile curve{"ie_curve", "z,ratio", {}};
      for (const auto& [z, ratio] : report.curve)
        if (!std::isinf(ratio)) curve.rows.push_back({z, ratio});
      bundle.curves.push_back(std::move(curve));
      continue;
    }
    if (analysis == "bounds") {
      require(strategy.rfind("canonical:", 0) == 0,
              "bounds analysis needs strategy = canonical:<name>");
      run_canonical(strategy.substr(10), disc, bundle);
      continue;
    }
    if (analysis == "regret") {
      Environment env = build_env(cfg);
      Mechanism mech = build_mech(cfg, env);
      if (strategy == "bne") {
        ValueDistribution F = parse_dist_literal(cfg.word("dist.1"));
        int n = env.agents();
        PaymentFormat fmt = cfg.word_or("mech.format", "wpb") == "allpay"
                                ? PaymentFormat::AllPay
                                : PaymentFormat::WinnerPaysBid;
        BneResult bne = symmetric_bne(F, n, fmt, static_cast<int>(cfg.number_or("disc", 200)));
        RegretReport rep = regret(mech, bne_joint(bne, n), build_grid(cfg));
        bundle.add("max_eps", rep.max_eps, source);
      } else {
        ValueProfile values = cfg.number_list("values");
        BidProfile bids(values.size(), 0.0);
        if (cfg.has("strategy.start")) bids = cfg.number_list("strategy.start");
        JointScenario joint(std::vector<Scenario>{{1.0, values, bids}});
        RegretReport rep = regret(mech, joint, build_grid(cfg));
        bundle.add("max_eps", rep.max_eps, source);
      }
      continue;
    }
    if (analysis == "equilibrium") {
      Environment env = build_env(cfg);
      Mechanism mech = build_mech(cfg, env);
      if (strategy == "br-dynamics" || strategy == "br_dynamics") {
        ValueProfile values = cfg.number_list("values");
        DynamicsOptions opts;
        if (cfg.has("strategy.start")) opts.start = cfg.number_list("strategy.start");
        DynamicsResult result = br_dynamics(mech, values, build_grid(cfg), opts);
        bundle.add("dynamics_eps", result.regret.max_eps, source);
        bundle.add_flag("dynamics_converged", result.converged, source);
        bundle.add("dynamics_welfare", expected_welfare(mech, JointScenario(std::vector<Scenario>{
                                            {1.0, values, result.profile}})),
                   source);
        CurveFile prof{"profile", "agent,value,bid", {}};
        for (std::size_t i = 0; i < values.size(); ++i)
          prof.rows.push_back({static_cast<double>(i + 1), values[i], result.profile[i]});
        bundle.curves.push_back(std::move(prof));
      } else if (strategy == "bne") {
        ValueDistribution F = parse_dist_literal(cfg.word("dist.1"));
        PaymentFormat fmt = cfg.word_or("mech.format", "wpb") == "allpay"
                                ? PaymentFormat::AllPay
                                : PaymentFormat::WinnerPaysBid;
        int g = static_cast<int>(cfg.number_or("disc", 200));
        BneResult bne = symmetric_bne(F, env.agents(), fmt, g);
        bundle.add("bne_revenue", symmetric_bne_revenue(bne, env.agents(), fmt), source);
        RegretReport rep = regret(mech, bne_joint(bne, env.agents()), build_grid(cfg));
        bundle.add("bne_regret", rep.max_eps, source);
        CurveFile prof{"profile", "value,bid", {}};
        for (const auto& [v, b] : bne.profile.table(0)) prof.rows.push_back({v, b});
        bundle.curves.push_back(std::move(prof));
      } else {
        throw input_error("equilibrium analysis needs strategy = bne or br-dynamics");
      }
      continue;
    }
    if (analysis == "compose") {
      int copies = static_cast<int>(cfg.number_or("compose.copies", 2));
      int scenarios = static_cast<int>(cfg.number_or("compose.scenarios", 100));
      int n = static_cast<int>(cfg.number_or("n", 3));
      CompositionReport rep = simultaneous_fpa_check(n, copies, 2, scenarios, seed);
      bundle.add("compose_min_weak_ce", rep.min_weak_ce, source);
      bundle.add("compose_max_dominance_gap", rep.max_dominance_gap, source);
      bundle.add_flag("compose_pass", rep.pass, source);
      continue;
    }
    if (analysis == "allpay") {
      Environment env = build_env(cfg);
      TieBreakPolicy tie = build_tiebreak(cfg, env.agents());
      AllocationRule rule = AllocationRule::highest_bids_win(env, tie);
      BidGrid grid = build_grid(cfg);
      CEOptions opts;
      opts.seed = seed;
      CEReport wpb = ce_deterministic(winner_pays_bid(rule), grid, opts);
      CEReport ap = ce_deterministic(all_pay(rule), grid, opts);
      bundle.add("wpb_mu_hat", wpb.mu_hat, source);
      bundle.add("allpay_mu_hat", ap.mu_hat, source);
      bundle.add_flag("allpay_dominates_wpb", ap.mu_hat >= wpb.mu_hat - 1e-9, source);
      continue;
    }
    throw input_error("unknown analysis: " + analysis);
  }
  return bundle;
}

int run_scenario_to_files(const ScenarioConfig& cfg, const std::string& out_dir) {
  try {
    ReportBundle bundle = run_scenario(cfg);
    emit(bundle, out_dir);
    return bundle.all_pass() ? 0 : 1;
  } catch (const budget_error& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace rae
