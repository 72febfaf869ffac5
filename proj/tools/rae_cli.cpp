// Scenario-driven batch runner for auction efficiency analyses.
//
// Subcommands restrict which analyses of a config file run; `examples`
// needs no config at all.  Exit codes: 0 all pass, 1 bound failure,
// 2 input error, 3 budget error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "rae/scenario.hpp"

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  double seed = -1.0;
  double grid = -1.0;
  double tol = -1.0;
  double budget = -1.0;
};

void apply_flags(rae::ScenarioConfig& cfg, const GlobalFlags& flags) {
  if (flags.seed >= 0.0) cfg.set("seed", rae::ConfigValue::number(flags.seed));
  if (flags.grid >= 0.0) cfg.set("grid.bids", rae::ConfigValue::number(flags.grid));
  if (flags.tol >= 0.0) cfg.set("tol", rae::ConfigValue::number(flags.tol));
  if (flags.budget >= 0.0) cfg.set("budget", rae::ConfigValue::number(flags.budget));
  if (!flags.out.empty()) cfg.set("out", rae::ConfigValue::word(flags.out));
}

int run(rae::ScenarioConfig cfg, const GlobalFlags& flags,
        const std::string& restrict_analysis) {
  apply_flags(cfg, flags);
  if (!restrict_analysis.empty()) {
    rae::ConfigValue list;
    list.type = rae::ConfigValue::Type::List;
    list.items.push_back(rae::ConfigValue::word(restrict_analysis));
    cfg.set("analyses", list);
  }
  std::string out_dir = cfg.word_or("out", "out");
  int code = rae::run_scenario_to_files(cfg, out_dir);
  if (code == 0)
    std::cout << "all checks passed; reports in " << out_dir << "\n";
  else if (code == 1)
    std::cout << "BOUND FAILURE; see " << out_dir << "/summary.txt\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rae: robust efficiency analysis of auction mechanisms"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--seed", flags.seed, "RNG seed for sampled analyses");
  app.add_option("--grid", flags.grid, "bid grid point count");
  app.add_option("--tol", flags.tol, "report tolerance override");
  app.add_option("--budget", flags.budget, "enumeration budget");
  app.add_option("--out", flags.out, "output directory (default: out, or RAE_OUT)");

  std::string config_path;
  std::string example_name = "all";

  auto add_config = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->add_option("config", config_path, "scenario config file")->required();
  };
  CLI::App* ce = app.add_subcommand("ce", "competitive efficiency over a bid grid");
  add_config(ce);
  CLI::App* ie = app.add_subcommand("ie", "individual efficiency of a bidding outcome");
  add_config(ie);
  CLI::App* bounds = app.add_subcommand("bounds", "welfare/revenue bound checks");
  add_config(bounds);
  CLI::App* equilibrium =
      app.add_subcommand("equilibrium", "equilibrium construction (bne | br-dynamics)");
  add_config(equilibrium);
  CLI::App* all = app.add_subcommand("all", "every analysis a config declares");
  add_config(all);
  CLI::App* examples =
      app.add_subcommand("examples", "built-in lower-bound instances with their checks");
  examples->fallthrough();
  examples->add_option("name", example_name,
                       "cor-welfare | rev-half | partial-alloc | all");

  CLI11_PARSE(app, argc, argv);

  if (flags.out.empty()) {
    if (const char* env = std::getenv("RAE_OUT")) flags.out = env;
  }

  try {
    if (examples->parsed()) {
      int worst = 0;
      std::vector<std::string> names;
      if (example_name == "all")
        names = {"cor-welfare", "rev-half", "partial-alloc"};
      else
        names = {example_name};
      for (const std::string& name : names) {
        rae::ScenarioConfig cfg;
        cfg.set("name", rae::ConfigValue::word(name));
        cfg.set("strategy", rae::ConfigValue::word("canonical:" + name));
        rae::ConfigValue list;
        list.type = rae::ConfigValue::Type::List;
        list.items.push_back(rae::ConfigValue::word("examples"));
        cfg.set("analyses", list);
        apply_flags(cfg, flags);
        std::string out_dir = cfg.word_or("out", "out");
        int code = rae::run_scenario_to_files(cfg, out_dir + "/" + name);
        if (code != 0) std::cout << name << ": FAILED\n";
        worst = std::max(worst, code);
      }
      if (worst == 0) std::cout << "all example checks passed\n";
      return worst;
    }

    rae::ScenarioConfig cfg = rae::ScenarioConfig::parse_file(config_path);
    if (ce->parsed()) return run(std::move(cfg), flags, "ce");
    if (ie->parsed()) return run(std::move(cfg), flags, "ie");
    if (bounds->parsed()) return run(std::move(cfg), flags, "bounds");
    if (equilibrium->parsed()) return run(std::move(cfg), flags, "equilibrium");
    return run(std::move(cfg), flags, "");
  } catch (const rae::budget_error& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const rae::input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  }
}
