// Two-stage mechanism: equalize error rates across groups by randomized
// post-processing, then set stakes so that equilibrium prevalences match.
// Also the equal-stakes design and its feasibility classification.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fairstakes/classifier.hpp"
#include "fairstakes/distribution.hpp"
#include "fairstakes/equilibrium.hpp"
#include "fairstakes/errors.hpp"
#include "fairstakes/fairness.hpp"

namespace fairstakes {

inline constexpr int kThresholdGridSize = 2049;
inline constexpr double kThresholdRefineTolerance = 1e-8;
inline constexpr double kProfileMatchTolerance = 1e-10;

// Shared post-processing targets; informative designs have tpr > fpr.
struct ErrorTargets {
  double tpr = 0.0;
  double fpr = 0.0;
  double delta() const { return tpr - fpr; }
};

// Step-1 artifacts for one group.
struct GroupPostProcessing {
  double threshold = 0.0;  // s^g
  double ell = 0.0;        // F0(threshold)
  double m = 0.0;          // F1(threshold)
  double a = 0.0;          // acceptance probability below the threshold
  double b = 0.0;          // acceptance probability at or above it
  DecisionRule rule{TwoPieceRule{}};
};

struct StepOneDesign {
  std::array<GroupPostProcessing, 2> groups;
  ErrorTargets targets;
};

namespace detail {

template <class Fn>
double golden_section_max(const Fn& f, double lo, double hi, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

// Unique (a, b) putting the group's two-piece rule on target error rates.
inline std::pair<double, double> step1_coefficients(double ell, double m,
                                                    double delta) {
  const double a = 0.5 - delta * (1.0 - ell) / (ell - m);
  const double b = 0.5 + delta * ell / (ell - m);
  return {a, b};
}

inline double clamp_unit(double v, const char* name) {
  if (v < -1e-12 || v > 1.0 + 1e-12)
    throw ConstructionError(std::string(name) +
                            " fell outside [0, 1]; signal model is degenerate");
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace detail

// Picks the signal threshold maximizing F0(s) - F1(s) over the admissible
// interior where 0 < F1(s) and F0(s) < 1. Grid scan over the joint
// 0.001/0.999 quantile hull, refined by golden section.
inline double choose_threshold(const SignalModel& model) {
  const double lo =
      std::min(model.f0.quantile(0.001), model.f1.quantile(0.001));
  const double hi =
      std::max(model.f0.quantile(0.999), model.f1.quantile(0.999));
  const auto gap = [&](double s) { return model.f0.cdf(s) - model.f1.cdf(s); };
  const auto admissible = [&](double s) {
    return model.f1.cdf(s) > 0.0 && model.f0.cdf(s) < 1.0;
  };

  const int n = kThresholdGridSize;
  int best = -1;
  double best_gap = 0.0;
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = lo + (hi - lo) * i / (n - 1);
    grid[static_cast<std::size_t>(i)] = s;
    if (!admissible(s)) continue;
    const double g = gap(s);
    if (g > best_gap) {
      best_gap = g;
      best = i;
    }
  }
  if (best < 0)
    throw ConstructionError(
        "no admissible signal threshold with F0(s) > F1(s); "
        "signal model is uninformative on its support");

  const double a = grid[static_cast<std::size_t>(std::max(best - 1, 0))];
  const double b = grid[static_cast<std::size_t>(std::min(best + 1, n - 1))];
  const double s_star =
      detail::golden_section_max(gap, a, b, kThresholdRefineTolerance);
  if (!(model.f1.cdf(s_star) > 0.0 && model.f0.cdf(s_star) < 1.0 &&
        gap(s_star) > 0.0))
    throw ConstructionError("refined signal threshold left the admissible region");
  return s_star;
}

// Step 1: group-specific two-piece rules whose error profiles both equal the
// shared targets F = 1/2, T = 1/2 + Delta with
// Delta = min over groups of (l - m) / (2 max{l, 1 - l}).
inline StepOneDesign equalize_error_rates(const GroupEnvironment& first,
                                          const GroupEnvironment& second) {
  const std::array<const GroupEnvironment*, 2> envs{&first, &second};

  std::array<double, 2> s{}, ell{}, m{};
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < 2; ++g) {
    const SignalModel& model = envs[g]->signal;
    const auto grid = mlrp_grid(model);
    const MlrpReport mlrp = verify_mlrp(model, grid);
    if (!mlrp.pass)
      throw ConstructionError(
          "signal model fails the MLRP check (min F0 - F1 margin " +
          std::to_string(mlrp.min_margin) + " at s = " +
          std::to_string(mlrp.argmin) + ")");
    s[g] = choose_threshold(model);
    ell[g] = model.f0.cdf(s[g]);
    m[g] = model.f1.cdf(s[g]);
    if (!(m[g] < ell[g]))
      throw ConstructionError("chosen threshold has F1 >= F0; MLRP violated");
    delta = std::min(delta, (ell[g] - m[g]) /
                                (2.0 * std::max(ell[g], 1.0 - ell[g])));
  }

  StepOneDesign design;
  design.targets = ErrorTargets{0.5 + delta, 0.5};
  for (std::size_t g = 0; g < 2; ++g) {
    auto [a, b] = detail::step1_coefficients(ell[g], m[g], delta);
    a = detail::clamp_unit(a, "step-1 coefficient a");
    b = detail::clamp_unit(b, "step-1 coefficient b");
    GroupPostProcessing& piece = design.groups[g];
    piece.threshold = s[g];
    piece.ell = ell[g];
    piece.m = m[g];
    piece.a = a;
    piece.b = b;
    piece.rule = DecisionRule(TwoPieceRule{s[g], a, b});
    const ErrorProfile realized = error_profile(piece.rule, envs[g]->signal);
    if (std::fabs(realized.tpr - design.targets.tpr) > kProfileMatchTolerance ||
        std::fabs(realized.fpr - design.targets.fpr) > kProfileMatchTolerance)
      throw ConstructionError("realized error profile missed its targets");
  }
  if (!(design.targets.delta() > 0.0))
    throw ConstructionError("equalized targets are uninformative (T <= F)");
  return design;
}

// Step 2: give the group with the higher sincere prevalence the base reward
// (0 by default) and match the other group's equilibrium prevalence to it
// through the generalized inverse of its cost CDF.
inline std::array<Stakes, 2> design_stakes_theorem1(
    const GroupEnvironment& first, const GroupEnvironment& second,
    const ErrorTargets& targets, double base_reward = 0.0) {
  if (!(targets.delta() > 0.0))
    throw std::invalid_argument("design_stakes_theorem1 requires T > F");
  if (base_reward < 0.0)
    throw std::invalid_argument("base reward must be non-negative");
  const double informativeness = targets.delta();

  const double sincere_first = first.cost.cdf(0.0);
  const double sincere_second = second.cost.cdf(0.0);
  const std::size_t high = sincere_first >= sincere_second ? 0 : 1;
  const GroupEnvironment& high_env = high == 0 ? first : second;
  const GroupEnvironment& low_env = high == 0 ? second : first;

  double target_prevalence =
      high_env.cost.cdf(base_reward * informativeness);
  if (!(target_prevalence > 0.0 && target_prevalence < 1.0)) {
    // A normal CDF never truly attains 0 or 1 at a finite point; a saturated
    // value is double rounding, so match at the nearest representable
    // interior probability. Bounded-support distributions are genuinely
    // degenerate here.
    if (!high_env.cost.is_normal())
      throw ConstructionError(
          "target prevalence is degenerate; the matching quantile is "
          "undefined");
    target_prevalence = target_prevalence >= 1.0
                            ? std::nextafter(1.0, 0.0)
                            : std::nextafter(0.0, 1.0);
  }
  const double matched_cutoff = low_env.cost.quantile(target_prevalence);

  std::array<Stakes, 2> stakes{};
  stakes[high] = Stakes{base_reward};
  stakes[1 - high] = Stakes{matched_cutoff / informativeness};
  return stakes;
}

struct EqualStakesResult {
  enum class Tag { Feasible, InfeasibleDominance } tag = Tag::Feasible;
  // Feasible:
  double r = 0.0;
  double crossing = 0.0;
  bool aligned_incentives_holds = true;
  // InfeasibleDominance: which argument's cost distribution dominates.
  DominanceTag direction = DominanceTag::IdenticalWithinTolerance;

  bool feasible() const { return tag == Tag::Feasible; }
};

// Shared stakes r = c / (T - F) at a cost-CDF crossing c, when one exists.
// Prefers the largest non-negative crossing (preserving aligned incentives),
// falling back to the crossing closest to zero.
inline EqualStakesResult design_stakes_equal(const GroupEnvironment& first,
                                             const GroupEnvironment& second,
                                             const ErrorTargets& targets) {
  if (!(targets.delta() > 0.0))
    throw std::invalid_argument("design_stakes_equal requires T > F");
  const DominanceVerdict verdict =
      classify_dominance(first.cost, second.cost);

  EqualStakesResult result;
  switch (verdict.tag) {
    case DominanceTag::FirstDominatesSecond:
    case DominanceTag::SecondDominatesFirst:
      result.tag = EqualStakesResult::Tag::InfeasibleDominance;
      result.direction = verdict.tag;
      return result;
    case DominanceTag::IdenticalWithinTolerance:
      // Any shared r equalizes prevalence; zero also keeps it sincere.
      result.r = 0.0;
      result.crossing = 0.0;
      result.aligned_incentives_holds = true;
      return result;
    case DominanceTag::Crossing:
      break;
  }

  double chosen = verdict.crossings.front();
  bool have_nonneg = false;
  for (double c : verdict.crossings) {
    if (c >= 0.0) {
      if (!have_nonneg || c > chosen) chosen = c;
      have_nonneg = true;
    } else if (!have_nonneg && std::fabs(c) < std::fabs(chosen)) {
      chosen = c;
    }
  }
  result.crossing = chosen;
  result.r = chosen / targets.delta();
  result.aligned_incentives_holds = chosen >= 0.0;
  return result;
}

enum class DesignMode { Theorem1, EqualStakes };

struct MechanismConfig {
  DesignMode mode = DesignMode::Theorem1;
  double base_reward = 0.0;  // theorem-1 reward for the advantaged group
  double fairness_tolerance = kDefaultFairnessTolerance;
};

struct GroupDesign {
  GroupPostProcessing post;
  Stakes stakes;
  EquilibriumOutcome outcome;
};

struct MechanismDesign {
  DesignMode mode = DesignMode::Theorem1;
  ErrorTargets targets;
  std::array<GroupDesign, 2> groups;
  std::optional<EqualStakesResult> equal_stakes;  // set in equal-stakes mode
  FairnessReport fairness;

  double delta() const { return targets.delta(); }
};

// One shared-stakes grid point: equilibrium prevalences and PPVs of both
// groups under the step-1 rules, with signed first-minus-second gaps.
struct SweepRow {
  double r = 0.0;
  std::array<double, 2> prevalence{};
  std::array<std::optional<double>, 2> ppv{};
  double prevalence_gap = 0.0;
  std::optional<double> ppv_gap;
};

inline std::vector<SweepRow> sweep_shared_stakes(const GroupEnvironment& first,
                                                 const GroupEnvironment& second,
                                                 double r_min, double r_max,
                                                 int steps) {
  if (steps < 1) throw std::invalid_argument("sweep needs at least one point");
  if (!(r_min <= r_max))
    throw std::invalid_argument("sweep needs r_min <= r_max");
  const StepOneDesign step1 = equalize_error_rates(first, second);
  const std::array<const GroupEnvironment*, 2> envs{&first, &second};

  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    SweepRow row;
    row.r = steps == 1 ? r_min
                       : r_min + (r_max - r_min) * i / (steps - 1);
    for (std::size_t g = 0; g < 2; ++g) {
      GroupEnvironment env = *envs[g];
      env.stakes = Stakes{row.r};
      const EquilibriumOutcome outcome =
          solve_equilibrium(env, step1.groups[g].rule);
      row.prevalence[g] = outcome.prevalence;
      row.ppv[g] = outcome.ppv;
    }
    row.prevalence_gap = row.prevalence[0] - row.prevalence[1];
    if (row.ppv[0] && row.ppv[1]) row.ppv_gap = *row.ppv[0] - *row.ppv[1];
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MechanismDesign run_mechanism(const GroupEnvironment& first,
                                     const GroupEnvironment& second,
                                     const MechanismConfig& config = {}) {
  const StepOneDesign step1 = equalize_error_rates(first, second);

  MechanismDesign design;
  design.mode = config.mode;
  design.targets = step1.targets;

  std::array<Stakes, 2> stakes{};
  if (config.mode == DesignMode::Theorem1) {
    stakes = design_stakes_theorem1(first, second, step1.targets,
                                    config.base_reward);
  } else {
    const EqualStakesResult equal =
        design_stakes_equal(first, second, step1.targets);
    design.equal_stakes = equal;
    if (!equal.feasible()) {
      const char* dominant =
          equal.direction == DominanceTag::SecondDominatesFirst ? "second"
                                                                : "first";
      throw ConstructionError(
          std::string("equal stakes cannot equalize prevalence: the ") +
          dominant + " group's cost distribution strictly dominates");
    }
    stakes = {Stakes{equal.r}, Stakes{equal.r}};
  }

  const std::array<const GroupEnvironment*, 2> envs{&first, &second};
  std::array<EquilibriumOutcome, 2> outcomes;
  for (std::size_t g = 0; g < 2; ++g) {
    GroupEnvironment env = *envs[g];
    env.stakes = stakes[g];
    outcomes[g] = solve_equilibrium(env, step1.groups[g].rule);
    design.groups[g] =
        GroupDesign{step1.groups[g], stakes[g], outcomes[g]};
  }
  design.fairness = evaluate(outcomes, stakes, config.fairness_tolerance);
  return design;
}

}  // namespace fairstakes
