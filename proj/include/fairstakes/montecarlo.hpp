// Seeded agent-population simulation; an independent check on the analytic
// equilibria. Agents best-respond to the analytic cutoff, then signals and
// decisions are drawn per agent.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairstakes/equilibrium.hpp"

namespace fairstakes {

namespace detail {

struct SplitMix64 {
  using result_type = std::uint64_t;
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<std::uint64_t>::max();
  }
  result_type operator()() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

constexpr std::uint64_t fmix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xFF51AFD7ED558CCDull;
  z ^= z >> 33;
  z *= 0xC4CEB9FE1A85EC53ull;
  z ^= z >> 33;
  return z;
}

// One generator per (seed, group, agent); the double hash keeps agent
// streams from being shifted windows of one another.
inline SplitMix64 agent_rng(std::uint64_t seed, std::uint64_t group,
                            std::uint64_t agent) {
  const std::uint64_t base =
      fmix64(seed ^ (0x9E3779B97F4A7C15ull * (group + 1)));
  return SplitMix64(fmix64(base ^ (agent * 0xD1B54A32D192ED03ull +
                                   0x2545F4914F6CDD1Dull)));
}

inline std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

inline std::optional<double> binomial_se(std::optional<double> p,
                                         std::int64_t n) {
  if (!p || n == 0) return std::nullopt;
  return std::sqrt(*p * (1.0 - *p) / static_cast<double>(n));
}

}  // namespace detail

struct GroupSimulation {
  std::int64_t n = 0;
  std::int64_t compliant = 0;
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  double prevalence = 0.0;
  std::optional<double> tpr, fpr, ppv;
  double prevalence_se = 0.0;
  std::optional<double> tpr_se, fpr_se, ppv_se;
};

struct SimulationResult {
  std::uint64_t seed = 0;
  std::int64_t n_per_group = 0;
  std::array<GroupSimulation, 2> groups;
};

inline SimulationResult simulate(const std::array<GroupEnvironment, 2>& envs,
                                 const std::array<DecisionRule, 2>& rules,
                                 const std::array<Stakes, 2>& stakes,
                                 std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("simulate: need n >= 1 agents");

  SimulationResult result;
  result.seed = seed;
  result.n_per_group = n;

  for (std::size_t g = 0; g < 2; ++g) {
    const GroupEnvironment& env = envs[g];
    const DecisionRule& rule = rules[g];
    const ErrorProfile profile = error_profile(rule, env.signal);
    const double cutoff = compliance_cutoff(profile, stakes[g]);

    GroupSimulation& sim = result.groups[g];
    sim.n = n;
    for (std::int64_t i = 0; i < n; ++i) {
      auto rng = detail::agent_rng(seed, g, static_cast<std::uint64_t>(i));
      const double cost = env.cost.sample(rng);
      const bool compliant = cost <= cutoff;
      const double signal =
          (compliant ? env.signal.f1 : env.signal.f0).sample(rng);
      const bool accepted = detail::unit_open(rng) <= rule.acceptance(signal);
      sim.compliant += compliant;
      if (compliant)
        (accepted ? sim.tp : sim.fn) += 1;
      else
        (accepted ? sim.fp : sim.tn) += 1;
    }

    sim.prevalence =
        static_cast<double>(sim.compliant) / static_cast<double>(n);
    sim.tpr = detail::ratio(sim.tp, sim.compliant);
    sim.fpr = detail::ratio(sim.fp, n - sim.compliant);
    sim.ppv = detail::ratio(sim.tp, sim.tp + sim.fp);
    sim.prevalence_se =
        std::sqrt(sim.prevalence * (1.0 - sim.prevalence) /
                  static_cast<double>(n));
    sim.tpr_se = detail::binomial_se(sim.tpr, sim.compliant);
    sim.fpr_se = detail::binomial_se(sim.fpr, n - sim.compliant);
    sim.ppv_se = detail::binomial_se(sim.ppv, sim.tp + sim.fp);
  }
  return result;
}

struct CellCheck {
  std::string name;
  double empirical = 0.0;
  double expected = 0.0;
  double se = 0.0;  // oracle standard error; 0 forces an exact comparison
  double z = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  std::array<std::vector<CellCheck>, 2> groups;
  double max_abs_z = 0.0;
  bool pass = false;
};

inline constexpr double kComparisonZLimit = 4.0;

// z-scores of the empirical cells against analytic values, using standard
// errors implied by the analytic model. Zero-SE cells must match exactly.
inline ComparisonReport compare(const SimulationResult& sim,
                                const std::array<EquilibriumOutcome, 2>& analytic) {
  ComparisonReport report;
  report.pass = true;

  for (std::size_t g = 0; g < 2; ++g) {
    const GroupSimulation& s = sim.groups[g];
    const EquilibriumOutcome& a = analytic[g];
    const double n = static_cast<double>(s.n);
    auto& cells = report.groups[g];

    const auto push = [&](std::string name, double empirical, double expected,
                          double se) {
      CellCheck cell{std::move(name), empirical, expected, se, 0.0, false};
      if (se > 0.0) {
        cell.z = (empirical - expected) / se;
        cell.pass = std::fabs(cell.z) <= kComparisonZLimit;
      } else {
        cell.z = empirical == expected
                     ? 0.0
                     : std::numeric_limits<double>::infinity();
        cell.pass = empirical == expected;
      }
      report.max_abs_z = std::max(report.max_abs_z, std::fabs(cell.z));
      report.pass = report.pass && cell.pass;
      cells.push_back(std::move(cell));
    };

    const auto binom = [&](double p, double trials) {
      return trials > 0.0 ? std::sqrt(p * (1.0 - p) / trials) : 0.0;
    };

    push("prevalence", s.prevalence, a.prevalence,
         binom(a.prevalence, n));
    push("tp", static_cast<double>(s.tp) / n, a.confusion.tp,
         binom(a.confusion.tp, n));
    push("fp", static_cast<double>(s.fp) / n, a.confusion.fp,
         binom(a.confusion.fp, n));
    push("fn", static_cast<double>(s.fn) / n, a.confusion.fn,
         binom(a.confusion.fn, n));
    push("tn", static_cast<double>(s.tn) / n, a.confusion.tn,
         binom(a.confusion.tn, n));

    // Conditional rates use the realized number of trials.
    if (s.compliant > 0)
      push("tpr", *s.tpr, a.profile.tpr,
           binom(a.profile.tpr, static_cast<double>(s.compliant)));
    else
      push("tpr", 0.0, a.prevalence == 0.0 ? 0.0 : a.profile.tpr,
           a.prevalence == 0.0 ? 0.0 : 1e-300);
    if (s.n - s.compliant > 0)
      push("fpr", *s.fpr, a.profile.fpr,
           binom(a.profile.fpr, static_cast<double>(s.n - s.compliant)));
    else
      push("fpr", 0.0, a.prevalence == 1.0 ? 0.0 : a.profile.fpr,
           a.prevalence == 1.0 ? 0.0 : 1e-300);

    if (s.ppv && a.ppv)
      push("ppv", *s.ppv, *a.ppv,
           binom(*a.ppv, static_cast<double>(s.tp + s.fp)));
    else
      push("ppv", s.ppv ? *s.ppv : 0.0, a.ppv ? *a.ppv : 0.0,
           static_cast<bool>(s.ppv) == static_cast<bool>(a.ppv) ? 0.0
                                                                : 1e-300);
  }
  return report;
}

}  // namespace fairstakes
