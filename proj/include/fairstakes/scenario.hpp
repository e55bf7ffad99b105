// Scenario files: two named groups with cost/signal distributions, optional
// stakes (net or reward pair) and optional explicit decision rules.
#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "fairstakes/equilibrium.hpp"
#include "fairstakes/errors.hpp"
#include "fairstakes/mechanism.hpp"

namespace fairstakes {

using nlohmann::json;

struct GroupSpec {
  std::string name;
  ContinuousDistribution cost{Normal{}};
  SignalModel signal{ContinuousDistribution{Normal{0.0, 1.0}},
                     ContinuousDistribution{Normal{1.0, 1.0}}};
  std::optional<double> net_stakes;
  std::optional<DecisionRule> rule;

  GroupEnvironment environment() const {
    GroupEnvironment env{cost, signal, std::nullopt};
    if (net_stakes) env.stakes = Stakes{*net_stakes};
    return env;
  }
};

struct RunOptions {
  DesignMode mode = DesignMode::Theorem1;
  double tolerance = kDefaultFairnessTolerance;
  std::uint64_t seed = 12345;
  std::int64_t n = 100000;
  double base_reward = 0.0;
};

struct Scenario {
  int version = 1;
  std::array<GroupSpec, 2> groups;
  RunOptions options;

  std::array<std::string, 2> names() const {
    return {groups[0].name, groups[1].name};
  }
  std::array<GroupEnvironment, 2> environments() const {
    return {groups[0].environment(), groups[1].environment()};
  }
};

inline ContinuousDistribution parse_distribution(const json& j) {
  if (!j.is_object() || j.size() != 1)
    throw ValidationError(
        "distribution literal must be {\"normal\": ...} or {\"piecewise\": ...}");
  if (j.contains("normal")) {
    const json& n = j.at("normal");
    return ContinuousDistribution(
        Normal{n.at("mean").get<double>(), n.at("sd").get<double>()});
  }
  if (j.contains("piecewise")) {
    const json& knots = j.at("piecewise").at("knots");
    PiecewiseLinearCdf pw;
    for (const json& knot : knots) {
      if (!knot.is_array() || knot.size() != 2)
        throw ValidationError("piecewise knots must be [x, p] pairs");
      pw.x.push_back(knot.at(0).get<double>());
      pw.p.push_back(knot.at(1).get<double>());
    }
    return ContinuousDistribution(std::move(pw));
  }
  throw ValidationError("unknown distribution kind: " + j.begin().key());
}

inline json distribution_to_json(const ContinuousDistribution& dist) {
  if (const Normal* n = std::get_if<Normal>(&dist.rep()))
    return {{"normal", {{"mean", n->mean}, {"sd", n->sd}}}};
  const auto& pw = std::get<PiecewiseLinearCdf>(dist.rep());
  json knots = json::array();
  for (std::size_t i = 0; i < pw.x.size(); ++i)
    knots.push_back({pw.x[i], pw.p[i]});
  return {{"piecewise", {{"knots", knots}}}};
}

inline DecisionRule parse_rule(const json& j) {
  if (!j.is_object() || j.size() != 1)
    throw ValidationError(
        "rule literal must be {\"two_piece\": ...} or {\"tabulated\": ...}");
  if (j.contains("two_piece")) {
    const json& r = j.at("two_piece");
    return DecisionRule(TwoPieceRule{r.at("s").get<double>(),
                                     r.at("a").get<double>(),
                                     r.at("b").get<double>()});
  }
  if (j.contains("tabulated")) {
    const json& r = j.at("tabulated");
    TabulatedRule rule;
    rule.breaks = r.at("breaks").get<std::vector<double>>();
    rule.values = r.at("values").get<std::vector<double>>();
    return DecisionRule(std::move(rule));
  }
  throw ValidationError("unknown rule kind: " + j.begin().key());
}

inline json rule_to_json(const DecisionRule& rule) {
  if (const TwoPieceRule* r = std::get_if<TwoPieceRule>(&rule.rep()))
    return {{"two_piece",
             {{"s", r->threshold}, {"a", r->below}, {"b", r->at_or_above}}}};
  const auto& r = std::get<TabulatedRule>(rule.rep());
  return {{"tabulated", {{"breaks", r.breaks}, {"values", r.values}}}};
}

inline DesignMode parse_mode(const std::string& mode) {
  if (mode == "theorem1") return DesignMode::Theorem1;
  if (mode == "equal-stakes" || mode == "equal_stakes")
    return DesignMode::EqualStakes;
  throw ValidationError("mode must be \"theorem1\" or \"equal-stakes\", got \"" +
                        mode + "\"");
}

inline std::string mode_name(DesignMode mode) {
  return mode == DesignMode::Theorem1 ? "theorem1" : "equal-stakes";
}

inline Scenario parse_scenario(const json& j) {
  try {
    if (!j.contains("version"))
      throw ValidationError("scenario is missing the \"version\" field");
    Scenario scenario;
    scenario.version = j.at("version").get<int>();
    if (scenario.version != 1)
      throw ValidationError("unsupported scenario version " +
                            std::to_string(scenario.version));

    const json& groups = j.at("groups");
    if (!groups.is_object() || groups.size() != 2)
      throw ValidationError("scenario requires exactly two named groups, got " +
                            std::to_string(groups.size()));
    std::size_t g = 0;
    for (const auto& [name, spec] : groups.items()) {
      GroupSpec& out = scenario.groups[g++];
      out.name = name;
      out.cost = parse_distribution(spec.at("cost"));
      if (spec.contains("signal")) {
        const json& sig = spec.at("signal");
        out.signal = SignalModel{parse_distribution(sig.at("f0")),
                                 parse_distribution(sig.at("f1"))};
      }
      if (spec.contains("stakes") && spec.contains("rewards"))
        throw ValidationError("group \"" + name +
                              "\": give net \"stakes\" or a \"rewards\" pair, "
                              "not both");
      if (spec.contains("stakes")) {
        out.net_stakes = spec.at("stakes").get<double>();
      } else if (spec.contains("rewards")) {
        const json& rw = spec.at("rewards");
        out.net_stakes = rw.at("positive").get<double>() -
                         rw.at("negative").get<double>();
      }
      if (spec.contains("rule")) out.rule = parse_rule(spec.at("rule"));
    }

    if (j.contains("options")) {
      const json& opt = j.at("options");
      RunOptions& run = scenario.options;
      if (opt.contains("mode"))
        run.mode = parse_mode(opt.at("mode").get<std::string>());
      if (opt.contains("tolerance")) {
        run.tolerance = opt.at("tolerance").get<double>();
        if (!(run.tolerance > 0.0))
          throw ValidationError("options.tolerance must be positive");
      }
      if (opt.contains("seed"))
        run.seed = opt.at("seed").get<std::uint64_t>();
      if (opt.contains("n")) {
        run.n = opt.at("n").get<std::int64_t>();
        if (run.n < 1) throw ValidationError("options.n must be at least 1");
      }
      if (opt.contains("base_reward")) {
        run.base_reward = opt.at("base_reward").get<double>();
        if (run.base_reward < 0.0)
          throw ValidationError("options.base_reward must be non-negative");
      }
    }
    return scenario;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("invalid scenario: ") + e.what());
  }
}

inline json scenario_to_json(const Scenario& scenario) {
  json groups = json::object();
  for (const GroupSpec& g : scenario.groups) {
    json spec;
    spec["cost"] = distribution_to_json(g.cost);
    spec["signal"] = {{"f0", distribution_to_json(g.signal.f0)},
                      {"f1", distribution_to_json(g.signal.f1)}};
    if (g.net_stakes) spec["stakes"] = *g.net_stakes;
    if (g.rule) spec["rule"] = rule_to_json(*g.rule);
    groups[g.name] = std::move(spec);
  }
  return {{"version", scenario.version},
          {"groups", std::move(groups)},
          {"options",
           {{"mode", mode_name(scenario.options.mode)},
            {"tolerance", scenario.options.tolerance},
            {"seed", scenario.options.seed},
            {"n", scenario.options.n},
            {"base_reward", scenario.options.base_reward}}}};
}

inline Scenario parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }
  return parse_scenario(j);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

// The three built-in cost environments; signals default to the unit-variance
// pair with means 0 and 1 for both groups.
inline Scenario builtin_example(int id) {
  Scenario scenario;
  scenario.groups[0].name = "X";
  scenario.groups[1].name = "Y";
  switch (id) {
    case 1:
      scenario.groups[0].cost = ContinuousDistribution(Normal{0.0, 1.0});
      scenario.groups[1].cost = ContinuousDistribution(Normal{1.0, 1.0});
      scenario.options.mode = DesignMode::Theorem1;
      break;
    case 2:
      scenario.groups[0].cost = ContinuousDistribution(Normal{0.0, 2.0});
      scenario.groups[1].cost = ContinuousDistribution(Normal{1.0, 1.0});
      scenario.options.mode = DesignMode::EqualStakes;
      break;
    case 3:
      scenario.groups[0].cost = ContinuousDistribution(Normal{0.0, 2.0});
      scenario.groups[1].cost = ContinuousDistribution(Normal{-1.0, 1.0});
      scenario.options.mode = DesignMode::EqualStakes;
      break;
    default:
      throw ValidationError("example id must be 1, 2 or 3");
  }
  return scenario;
}

}  // namespace fairstakes
