#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rae/common.hpp"
#include "rae/dist.hpp"
#include "rae/report.hpp"

namespace rae {

// Typed value of one config entry.  Bare words and call-style literals
// (`uniform(0,1)`, `discrete[(1,0.5),(2,0.5)]`) are kept verbatim as
// strings; lists/tuples/sets nest.
struct ConfigValue {
  enum class Type { Number, String, List, Tuple, Set };
  Type type = Type::Number;
  double num = 0.0;
  std::string str;
  std::vector<ConfigValue> items;

  static ConfigValue number(double x);
  static ConfigValue word(std::string s);
  bool operator==(const ConfigValue& o) const;
  std::string serialize() const;
};

// Flat `key = value` scenario configuration.  Declared order is preserved;
// parse(serialize(c)) == c.
class ScenarioConfig {
 public:
  static ScenarioConfig parse(const std::string& text);
  static ScenarioConfig parse_file(const std::string& path);
  std::string serialize() const;
  bool operator==(const ScenarioConfig& o) const;

  void set(const std::string& key, ConfigValue v);  // replaces, keeps order
  const ConfigValue* find(const std::string& key) const;
  bool has(const std::string& key) const { return find(key) != nullptr; }

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string word(const std::string& key) const;
  std::string word_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> number_list(const std::string& key) const;

  const std::vector<std::pair<std::string, ConfigValue>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, ConfigValue>> entries_;
};

// `uniform(a,b) | equalrev(H=..) | examplecor | point(v) | discrete[(v,p),..]`
ValueDistribution parse_dist_literal(const std::string& literal);

// Executes the configured analyses (in declared order) and assembles the
// report bundle.  Unknown keys are rejected.  Deterministic given the seed.
ReportBundle run_scenario(const ScenarioConfig& config);

// run_scenario + emit, mapping errors to process exit codes:
// 0 all pass, 1 bound failure, 2 input error, 3 budget error.
int run_scenario_to_files(const ScenarioConfig& config, const std::string& out_dir);

}  // namespace rae
