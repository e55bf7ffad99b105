// Best-response behavior, equilibrium prevalence, population confusion
// matrices and positive predictive value.
#pragma once

#include <optional>
#include <stdexcept>

#include "fairstakes/classifier.hpp"
#include "fairstakes/distribution.hpp"

namespace fairstakes {

// Net benefit of a favorable decision; may be negative.
struct Stakes {
  double r = 0.0;
};

struct GroupEnvironment {
  ContinuousDistribution cost;
  SignalModel signal;
  std::optional<Stakes> stakes;
};

// Population masses; tp + fp + fn + tn == 1.
struct ConfusionMatrix {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;
};

struct EquilibriumOutcome {
  double cutoff = 0.0;      // cost threshold below which agents comply
  double prevalence = 0.0;  // equilibrium share of compliant agents
  double sincere_prevalence = 0.0;  // compliance share absent any stakes
  ErrorProfile profile;
  ConfusionMatrix confusion;
  std::optional<double> ppv;  // empty when no positive decisions are issued
};

// Agents comply exactly when their private cost is at most this cutoff.
inline double compliance_cutoff(const ErrorProfile& profile,
                                const Stakes& stakes) {
  return stakes.r * informativeness(profile);
}

inline std::optional<double> positive_predictive_value(
    double prevalence, const ErrorProfile& profile) {
  if (!(prevalence >= 0.0 && prevalence <= 1.0))
    throw std::domain_error("prevalence must lie in [0, 1]");
  const double positives =
      prevalence * profile.tpr + (1.0 - prevalence) * profile.fpr;
  if (positives == 0.0) return std::nullopt;
  return prevalence * profile.tpr / positives;
}

inline EquilibriumOutcome solve_equilibrium(const GroupEnvironment& env,
                                            const DecisionRule& rule) {
  if (!env.stakes)
    throw std::invalid_argument(
        "solve_equilibrium: environment has no stakes set");
  EquilibriumOutcome out;
  out.profile = error_profile(rule, env.signal);
  out.cutoff = compliance_cutoff(out.profile, *env.stakes);
  out.prevalence = env.cost.cdf(out.cutoff);
  out.sincere_prevalence = env.cost.cdf(0.0);
  out.confusion.tp = out.prevalence * out.profile.tpr;
  out.confusion.fp = (1.0 - out.prevalence) * out.profile.fpr;
  out.confusion.fn = out.prevalence * (1.0 - out.profile.tpr);
  out.confusion.tn = (1.0 - out.prevalence) * (1.0 - out.profile.fpr);
  out.ppv = positive_predictive_value(out.prevalence, out.profile);
  return out;
}

}  // namespace fairstakes
