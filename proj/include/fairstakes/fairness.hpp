// The four audit criteria: error-rate balance, predictive parity, equal
// stakes and aligned incentives, each reported with its numeric gap.
#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "fairstakes/equilibrium.hpp"

namespace fairstakes {

inline constexpr double kDefaultFairnessTolerance = 1e-9;

struct FairnessReport {
  double tolerance = kDefaultFairnessTolerance;

  struct ErrorRateBalance {
    double tpr_gap = 0.0;
    double fpr_gap = 0.0;
    bool pass = false;
  } error_rate_balance;

  struct PredictiveParity {
    double ppv_gap = 0.0;  // NaN when undefined
    bool undefined = false;
    bool pass = false;
  } predictive_parity;

  struct EqualStakes {
    double stakes_gap = 0.0;
    bool pass = false;
  } equal_stakes;

  struct AlignedIncentives {
    std::array<double, 2> margins{0.0, 0.0};  // prevalence - sincere, per group
    bool pass = false;
  } aligned_incentives;

  bool all_pass() const {
    return error_rate_balance.pass && predictive_parity.pass &&
           equal_stakes.pass && aligned_incentives.pass;
  }
};

inline FairnessReport evaluate(const std::array<EquilibriumOutcome, 2>& outcomes,
                               const std::array<Stakes, 2>& stakes,
                               double tolerance = kDefaultFairnessTolerance) {
  FairnessReport report;
  report.tolerance = tolerance;

  auto& eb = report.error_rate_balance;
  eb.tpr_gap = std::fabs(outcomes[0].profile.tpr - outcomes[1].profile.tpr);
  eb.fpr_gap = std::fabs(outcomes[0].profile.fpr - outcomes[1].profile.fpr);
  eb.pass = eb.tpr_gap <= tolerance && eb.fpr_gap <= tolerance;

  auto& pp = report.predictive_parity;
  if (outcomes[0].ppv && outcomes[1].ppv) {
    pp.ppv_gap = std::fabs(*outcomes[0].ppv - *outcomes[1].ppv);
    pp.pass = pp.ppv_gap <= tolerance;
  } else {
    // No positive decisions for at least one group: parity is unauditable,
    // which is distinct from a numeric failure.
    pp.ppv_gap = std::numeric_limits<double>::quiet_NaN();
    pp.undefined = true;
    pp.pass = false;
  }

  auto& es = report.equal_stakes;
  es.stakes_gap = std::fabs(stakes[0].r - stakes[1].r);
  es.pass = es.stakes_gap <= tolerance;

  auto& ai = report.aligned_incentives;
  for (int g = 0; g < 2; ++g)
    ai.margins[static_cast<std::size_t>(g)] =
        outcomes[static_cast<std::size_t>(g)].prevalence -
        outcomes[static_cast<std::size_t>(g)].sincere_prevalence;
  ai.pass = ai.margins[0] >= -tolerance && ai.margins[1] >= -tolerance;

  return report;
}

}  // namespace fairstakes
