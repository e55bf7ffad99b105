// Command-line entry points: built-in examples, scenario runs, shared-stakes
// sweeps, fairness audits and Monte-Carlo checks.
#pragma once

#include <array>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairstakes/report.hpp"

namespace fairstakes {

namespace detail {

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
  if (!out) throw ValidationError("error while writing file: " + path);
}

inline std::string output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FAIRSTAKES_OUT_DIR"); env && *env)
    return env;
  return ".";
}

inline MechanismConfig config_for(const Scenario& scenario,
                                  std::optional<DesignMode> mode_override) {
  MechanismConfig config;
  config.mode = mode_override.value_or(scenario.options.mode);
  config.base_reward = scenario.options.base_reward;
  config.fairness_tolerance = scenario.options.tolerance;
  return config;
}

struct ResolvedDesign {
  std::array<DecisionRule, 2> rules{DecisionRule(TwoPieceRule{}),
                                    DecisionRule(TwoPieceRule{})};
  std::array<Stakes, 2> stakes{};
  std::array<EquilibriumOutcome, 2> outcomes;
};

// Explicit rules/stakes when the scenario carries them for both groups,
// otherwise the mechanism construction under the scenario's mode.
inline ResolvedDesign resolve_design(const Scenario& scenario,
                                     std::optional<DesignMode> mode_override) {
  ResolvedDesign resolved;
  const auto envs = scenario.environments();
  const bool explicit_design =
      scenario.groups[0].rule && scenario.groups[1].rule &&
      scenario.groups[0].net_stakes && scenario.groups[1].net_stakes;
  if (explicit_design) {
    for (std::size_t g = 0; g < 2; ++g) {
      resolved.rules[g] = *scenario.groups[g].rule;
      resolved.stakes[g] = Stakes{*scenario.groups[g].net_stakes};
    }
  } else {
    const MechanismDesign design = run_mechanism(
        envs[0], envs[1], config_for(scenario, mode_override));
    for (std::size_t g = 0; g < 2; ++g) {
      resolved.rules[g] = design.groups[g].post.rule;
      resolved.stakes[g] = design.groups[g].stakes;
    }
  }
  for (std::size_t g = 0; g < 2; ++g) {
    GroupEnvironment env = envs[g];
    env.stakes = resolved.stakes[g];
    resolved.outcomes[g] = solve_equilibrium(env, resolved.rules[g]);
  }
  return resolved;
}

}  // namespace detail

inline int cmd_example(int id, const std::string& out_dir_flag,
                       const std::string& json_path, std::ostream& out) {
  const Scenario scenario = builtin_example(id);
  const auto envs = scenario.environments();
  const MechanismDesign design =
      run_mechanism(envs[0], envs[1], detail::config_for(scenario, {}));
  const auto names = scenario.names();

  out << "Example " << id << " (signal model per group: f0 normal(0,1), "
      << "f1 normal(1,1))\n";
  render_design(out, design, names);

  const std::string dir = detail::output_dir(out_dir_flag);
  const std::string stem = dir + "/example" + std::to_string(id);
  {
    std::ostringstream csv;
    write_figure_csv(csv, names, envs[0].cost, envs[1].cost);
    detail::write_text_file(stem + ".csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_cutoffs_csv(csv, names,
                      {design.groups[0].outcome, design.groups[1].outcome});
    detail::write_text_file(stem + "_cutoffs.csv", csv.str());
  }
  out << "Figure data: " << stem << ".csv, cutoffs: " << stem
      << "_cutoffs.csv\n";

  if (!json_path.empty())
    detail::write_text_file(json_path, design_to_json(design, names).dump(2));
  return 0;
}

inline int cmd_run(const std::string& path,
                   std::optional<DesignMode> mode_override,
                   const std::string& json_path, std::ostream& out) {
  const Scenario scenario = load_scenario(path);
  const auto envs = scenario.environments();
  const MechanismDesign design = run_mechanism(
      envs[0], envs[1], detail::config_for(scenario, mode_override));
  render_design(out, design, scenario.names());
  if (!json_path.empty())
    detail::write_text_file(json_path,
                            design_to_json(design, scenario.names()).dump(2));
  return 0;
}

inline int cmd_sweep(const std::string& path, double r_min, double r_max,
                     int steps, const std::string& out_path,
                     std::ostream& out) {
  const Scenario scenario = load_scenario(path);
  const auto envs = scenario.environments();
  const std::vector<SweepRow> rows =
      sweep_shared_stakes(envs[0], envs[1], r_min, r_max, steps);
  if (out_path.empty()) {
    write_sweep_csv(out, scenario.names(), rows);
  } else {
    std::ostringstream csv;
    write_sweep_csv(csv, scenario.names(), rows);
    detail::write_text_file(out_path, csv.str());
    out << "Sweep data: " << out_path << "\n";
  }
  return 0;
}

inline int cmd_audit(const std::string& path, const std::string& json_path,
                     std::ostream& out) {
  const Scenario scenario = load_scenario(path);
  for (const GroupSpec& g : scenario.groups) {
    if (!g.rule)
      throw ValidationError("audit requires an explicit rule for group \"" +
                            g.name + "\"");
    if (!g.net_stakes)
      throw ValidationError("audit requires stakes for group \"" + g.name +
                            "\"");
  }
  const auto envs = scenario.environments();
  std::array<EquilibriumOutcome, 2> outcomes;
  std::array<Stakes, 2> stakes{};
  for (std::size_t g = 0; g < 2; ++g) {
    stakes[g] = Stakes{*scenario.groups[g].net_stakes};
    outcomes[g] = solve_equilibrium(envs[g], *scenario.groups[g].rule);
  }
  const FairnessReport report =
      evaluate(outcomes, stakes, scenario.options.tolerance);

  const auto names = scenario.names();
  out << "Audit of explicit design\n";
  for (std::size_t g = 0; g < 2; ++g) {
    out << "  group " << names[g] << ": stakes "
        << detail::fmt6(stakes[g].r) << "  ";
    render_outcome(out, outcomes[g]);
  }
  render_fairness(out, report);

  if (!json_path.empty()) {
    json groups = json::array();
    for (std::size_t g = 0; g < 2; ++g)
      groups.push_back({{"name", names[g]},
                        {"stakes", stakes[g].r},
                        {"rule", rule_to_json(*scenario.groups[g].rule)},
                        {"equilibrium", outcome_to_json(outcomes[g])}});
    const json j = {{"groups", std::move(groups)},
                    {"fairness", fairness_to_json(report)}};
    detail::write_text_file(json_path, j.dump(2));
  }
  return 0;
}

inline int cmd_simulate(const std::string& path, std::optional<std::int64_t> n,
                        std::optional<std::uint64_t> seed,
                        const std::string& json_path,
                        const std::string& csv_path, std::ostream& out) {
  const Scenario scenario = load_scenario(path);
  const detail::ResolvedDesign design = detail::resolve_design(scenario, {});
  const std::int64_t agents = n.value_or(scenario.options.n);
  const std::uint64_t rng_seed = seed.value_or(scenario.options.seed);

  const SimulationResult sim = simulate(scenario.environments(), design.rules,
                                        design.stakes, agents, rng_seed);
  const ComparisonReport comparison = compare(sim, design.outcomes);

  const auto names = scenario.names();
  render_simulation(out, sim, names);
  render_comparison(out, comparison, names);

  if (!csv_path.empty()) {
    std::ostringstream csv;
    write_simulation_csv(csv, names, sim);
    detail::write_text_file(csv_path, csv.str());
  }
  if (!json_path.empty()) {
    json j = {{"simulation", simulation_to_json(sim, names)},
              {"comparison", comparison_to_json(comparison, names)}};
    json analytic = json::array();
    for (std::size_t g = 0; g < 2; ++g)
      analytic.push_back({{"name", names[g]},
                          {"equilibrium", outcome_to_json(design.outcomes[g])}});
    j["analytic"] = std::move(analytic);
    detail::write_text_file(json_path, j.dump(2));
  }
  return 0;
}

// Returns 0 on success, 2 on validation errors, 3 when a requested
// construction is infeasible for the environment.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"Equilibrium analysis of strategic binary classification "
               "with designable stakes"};
  app.require_subcommand(1);

  int example_id = 1;
  std::string out_dir, json_path, scenario_path, sweep_out, mode_flag;
  double r_min = 0.0, r_max = 10.0;
  int steps = 101;
  std::optional<std::int64_t> sim_n;
  std::optional<std::uint64_t> sim_seed;

  CLI::App* example = app.add_subcommand("example", "Run a built-in example");
  example->add_option("id", example_id, "Example id (1, 2 or 3)")
      ->required()
      ->check(CLI::Range(1, 3));
  example->add_option("--out-dir", out_dir,
                      "Directory for figure CSVs (default: "
                      "$FAIRSTAKES_OUT_DIR or .)");
  example->add_option("--json", json_path, "Write the full design as JSON");

  CLI::App* run = app.add_subcommand("run", "Run the mechanism on a scenario");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--mode", mode_flag, "theorem1 or equal-stakes");
  run->add_option("--json", json_path, "Write the full design as JSON");

  CLI::App* sweep =
      app.add_subcommand("sweep", "Sweep a shared stakes level over a grid");
  sweep->add_option("scenario", scenario_path, "Scenario JSON file")
      ->required();
  sweep->add_option("--r-min", r_min, "Smallest shared stakes value");
  sweep->add_option("--r-max", r_max, "Largest shared stakes value");
  sweep->add_option("--steps", steps, "Number of grid points")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "CSV output path (default: stdout)");

  CLI::App* audit =
      app.add_subcommand("audit", "Audit an explicit rules-and-stakes design");
  audit->add_option("scenario", scenario_path, "Scenario JSON file")
      ->required();
  audit->add_option("--json", json_path, "Write the audit as JSON");

  CLI::App* sim = app.add_subcommand(
      "simulate", "Monte-Carlo population check against the analytic solution");
  std::string sim_csv;
  sim->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  sim->add_option("--n", sim_n, "Agents per group");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--json", json_path, "Write results as JSON");
  sim->add_option("--csv", sim_csv, "Write per-group counts as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  }

  try {
    std::optional<DesignMode> mode_override;
    if (!mode_flag.empty()) mode_override = parse_mode(mode_flag);
    if (example->parsed())
      return cmd_example(example_id, out_dir, json_path, out);
    if (run->parsed())
      return cmd_run(scenario_path, mode_override, json_path, out);
    if (sweep->parsed())
      return cmd_sweep(scenario_path, r_min, r_max, steps, sweep_out, out);
    if (audit->parsed()) return cmd_audit(scenario_path, json_path, out);
    if (sim->parsed())
      return cmd_simulate(scenario_path, sim_n, sim_seed, json_path, sim_csv,
                          out);
  } catch (const ConstructionError& e) {
    err << "construction error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "validation error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace fairstakes
