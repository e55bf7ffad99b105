#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fairstakes/mechanism.hpp"
#include "fairstakes/montecarlo.hpp"

using namespace fairstakes;
using Catch::Approx;

namespace {

SignalModel default_signals() {
  return {ContinuousDistribution(Normal{0.0, 1.0}),
          ContinuousDistribution(Normal{1.0, 1.0})};
}

GroupEnvironment example_env(Normal cost) {
  return {ContinuousDistribution(cost), default_signals(), std::nullopt};
}

struct SincereSetup {
  std::array<GroupEnvironment, 2> envs;
  std::array<DecisionRule, 2> rules{DecisionRule(TwoPieceRule{}),
                                    DecisionRule(TwoPieceRule{})};
  std::array<Stakes, 2> stakes{};
  std::array<EquilibriumOutcome, 2> analytic;
};

// Example-1 costs with the step-1 rules and zero stakes everywhere.
SincereSetup sincere_setup() {
  SincereSetup s{{example_env(Normal{0.0, 1.0}), example_env(Normal{1.0, 1.0})},
                 {DecisionRule(TwoPieceRule{}), DecisionRule(TwoPieceRule{})},
                 {},
                 {}};
  const StepOneDesign step1 = equalize_error_rates(s.envs[0], s.envs[1]);
  for (std::size_t g = 0; g < 2; ++g) {
    s.rules[g] = step1.groups[g].rule;
    s.stakes[g] = Stakes{0.0};
    GroupEnvironment env = s.envs[g];
    env.stakes = s.stakes[g];
    s.analytic[g] = solve_equilibrium(env, s.rules[g]);
  }
  return s;
}

// One large sincere-behavior simulation shared across the checks below.
const SimulationResult& big_sincere_sim() {
  static const SimulationResult sim = [] {
    const SincereSetup s = sincere_setup();
    return simulate(s.envs, s.rules, s.stakes, 1000000, 777);
  }();
  return sim;
}

double max_mass_deviation(const SimulationResult& sim,
                          const std::array<EquilibriumOutcome, 2>& analytic) {
  double dev = 0.0;
  for (std::size_t g = 0; g < 2; ++g) {
    const GroupSimulation& s = sim.groups[g];
    const double n = static_cast<double>(s.n);
    dev = std::max(dev, std::fabs(s.prevalence - analytic[g].prevalence));
    dev = std::max(dev, std::fabs(s.tp / n - analytic[g].confusion.tp));
    dev = std::max(dev, std::fabs(s.fp / n - analytic[g].confusion.fp));
    dev = std::max(dev, std::fabs(s.fn / n - analytic[g].confusion.fn));
    dev = std::max(dev, std::fabs(s.tn / n - analytic[g].confusion.tn));
  }
  return dev;
}

}  // namespace

TEST_CASE("sincere populations match their base rates", "[montecarlo]") {
  const SincereSetup s = sincere_setup();
  const SimulationResult& sim = big_sincere_sim();
  for (std::size_t g = 0; g < 2; ++g) {
    const double h0 = s.envs[g].cost.cdf(0.0);
    const double bound =
        4.0 * std::sqrt(h0 * (1.0 - h0) / static_cast<double>(sim.groups[g].n));
    CHECK(std::fabs(sim.groups[g].prevalence - h0) < bound);
  }

  SECTION("the analytic comparison passes") {
    const ComparisonReport report = compare(sim, s.analytic);
    CHECK(report.pass);
    CHECK(report.max_abs_z <= 4.0);
  }
  SECTION("a shifted prevalence is caught immediately") {
    auto perturbed = s.analytic;
    perturbed[0].prevalence += 0.05;
    const ComparisonReport report = compare(sim, perturbed);
    CHECK_FALSE(report.pass);
    bool prevalence_failed = false;
    for (const CellCheck& cell : report.groups[0])
      if (cell.name == "prevalence") prevalence_failed = !cell.pass;
    CHECK(prevalence_failed);
  }
}

TEST_CASE("theorem-1 designs agree with the analytic confusion matrix",
          "[montecarlo]") {
  const GroupEnvironment x = example_env(Normal{0.0, 1.0});
  const GroupEnvironment y = example_env(Normal{1.0, 1.0});
  const MechanismDesign design = run_mechanism(x, y, {DesignMode::Theorem1});

  const std::array<GroupEnvironment, 2> envs{x, y};
  const std::array<DecisionRule, 2> rules{design.groups[0].post.rule,
                                          design.groups[1].post.rule};
  const std::array<Stakes, 2> stakes{design.groups[0].stakes,
                                     design.groups[1].stakes};
  const std::array<EquilibriumOutcome, 2> analytic{design.groups[0].outcome,
                                                   design.groups[1].outcome};

  const std::int64_t n = 200000;
  const SimulationResult sim = simulate(envs, rules, stakes, n, 2024);
  const ComparisonReport report = compare(sim, analytic);
  CHECK(report.pass);

  // The two groups' empirical confusion matrices agree with each other.
  const GroupSimulation& sx = sim.groups[0];
  const GroupSimulation& sy = sim.groups[1];
  const auto cells = {
      std::pair{sx.tp, sy.tp}, std::pair{sx.fp, sy.fp},
      std::pair{sx.fn, sy.fn}, std::pair{sx.tn, sy.tn}};
  for (const auto& [cx, cy] : cells) {
    const double px = static_cast<double>(cx) / n;
    const double py = static_cast<double>(cy) / n;
    const double p = 0.5 * (px + py);
    const double se = std::sqrt(2.0 * p * (1.0 - p) / n);
    CHECK(std::fabs(px - py) <= 4.0 * std::max(se, 1e-12));
  }
}

TEST_CASE("accept-all rules accept everyone", "[montecarlo]") {
  const std::array<GroupEnvironment, 2> envs{example_env(Normal{0.0, 1.0}),
                                             example_env(Normal{1.0, 1.0})};
  const std::array<DecisionRule, 2> rules{
      DecisionRule(TwoPieceRule{0.0, 1.0, 1.0}),
      DecisionRule(TwoPieceRule{0.0, 1.0, 1.0})};
  const std::array<Stakes, 2> stakes{Stakes{0.0}, Stakes{0.0}};
  const SimulationResult sim = simulate(envs, rules, stakes, 20000, 5);
  for (const GroupSimulation& g : sim.groups) {
    REQUIRE(g.tpr.value_or(1.0) == 1.0);
    REQUIRE(g.fpr.value_or(1.0) == 1.0);
    REQUIRE(g.fn == 0);
    REQUIRE(g.tn == 0);
  }
}

TEST_CASE("identical seeds reproduce identical populations", "[montecarlo]") {
  const SincereSetup s = sincere_setup();
  const SimulationResult a = simulate(s.envs, s.rules, s.stakes, 10000, 42);
  const SimulationResult b = simulate(s.envs, s.rules, s.stakes, 10000, 42);
  for (std::size_t g = 0; g < 2; ++g) {
    REQUIRE(a.groups[g].compliant == b.groups[g].compliant);
    REQUIRE(a.groups[g].tp == b.groups[g].tp);
    REQUIRE(a.groups[g].fp == b.groups[g].fp);
    REQUIRE(a.groups[g].fn == b.groups[g].fn);
    REQUIRE(a.groups[g].tn == b.groups[g].tn);
  }
  const SimulationResult c = simulate(s.envs, s.rules, s.stakes, 10000, 43);
  bool any_difference = false;
  for (std::size_t g = 0; g < 2; ++g)
    any_difference = any_difference || a.groups[g].tp != c.groups[g].tp;
  CHECK(any_difference);
}

TEST_CASE("deviations shrink as the population grows", "[montecarlo]") {
  const SincereSetup s = sincere_setup();
  const double dev4 =
      max_mass_deviation(simulate(s.envs, s.rules, s.stakes, 10000, 777),
                         s.analytic);
  const double dev5 =
      max_mass_deviation(simulate(s.envs, s.rules, s.stakes, 100000, 777),
                         s.analytic);
  const double dev6 = max_mass_deviation(big_sincere_sim(), s.analytic);
  CHECK(dev5 < dev4);
  CHECK(dev6 < dev5);
}

TEST_CASE("empty populations are rejected", "[montecarlo]") {
  const SincereSetup s = sincere_setup();
  CHECK_THROWS_AS(simulate(s.envs, s.rules, s.stakes, 0, 1),
                  std::invalid_argument);
}
