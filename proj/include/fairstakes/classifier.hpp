// Randomized decision rules over signals and the error rates they induce.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "fairstakes/distribution.hpp"

namespace fairstakes {

// Accept with probability `below` for s < threshold and `at_or_above` for
// s >= threshold.
struct TwoPieceRule {
  double threshold = 0.0;
  double below = 0.0;
  double at_or_above = 1.0;
};

// Piecewise-constant acceptance probabilities: values[i] applies on
// [breaks[i-1], breaks[i]) with implicit sentinels at -inf and +inf, so
// values.size() == breaks.size() + 1.
struct TabulatedRule {
  std::vector<double> breaks;
  std::vector<double> values;
};

class DecisionRule {
 public:
  DecisionRule(TwoPieceRule r) : rep_(r) { validate(); }
  DecisionRule(TabulatedRule r) : rep_(std::move(r)) { validate(); }

  double acceptance(double s) const {
    if (const TwoPieceRule* r = std::get_if<TwoPieceRule>(&rep_))
      return s < r->threshold ? r->below : r->at_or_above;
    const auto& r = std::get<TabulatedRule>(rep_);
    const auto it = std::upper_bound(r.breaks.begin(), r.breaks.end(), s);
    return r.values[static_cast<std::size_t>(it - r.breaks.begin())];
  }

  const std::variant<TwoPieceRule, TabulatedRule>& rep() const { return rep_; }

 private:
  static void check_probability(double v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument(
          "decision rule acceptance probabilities must lie in [0, 1]");
  }

  void validate() const {
    if (const TwoPieceRule* r = std::get_if<TwoPieceRule>(&rep_)) {
      if (!std::isfinite(r->threshold))
        throw std::invalid_argument("two-piece threshold must be finite");
      check_probability(r->below);
      check_probability(r->at_or_above);
      return;
    }
    const auto& r = std::get<TabulatedRule>(rep_);
    if (r.values.size() != r.breaks.size() + 1)
      throw std::invalid_argument(
          "tabulated rule needs one value per region: |values| == |breaks|+1");
    for (std::size_t i = 0; i < r.breaks.size(); ++i) {
      if (!std::isfinite(r.breaks[i]))
        throw std::invalid_argument("tabulated breakpoints must be finite");
      if (i > 0 && !(r.breaks[i] > r.breaks[i - 1]))
        throw std::invalid_argument(
            "tabulated breakpoints must be strictly increasing");
    }
    for (double v : r.values) check_probability(v);
  }

  std::variant<TwoPieceRule, TabulatedRule> rep_;
};

struct ErrorProfile {
  double tpr = 0.0;
  double fpr = 0.0;
};

// tpr - fpr; the rule beats random assignment for the group iff positive.
inline double informativeness(const ErrorProfile& profile) {
  return profile.tpr - profile.fpr;
}

namespace detail {

inline double tabulated_rate(const TabulatedRule& rule,
                             const ContinuousDistribution& signal) {
  double rate = 0.0;
  double prev = 0.0;  // F(-inf)
  for (std::size_t i = 0; i < rule.breaks.size(); ++i) {
    const double cur = signal.cdf(rule.breaks[i]);
    rate += rule.values[i] * (cur - prev);
    prev = cur;
  }
  rate += rule.values.back() * (1.0 - prev);
  return rate;
}

}  // namespace detail

// Acceptance rates conditional on behavior. Two-piece rules use the closed
// form tpr = a*m + b*(1-m), fpr = a*l + b*(1-l) with m = F1(s*), l = F0(s*);
// tabulated rules sum exact CDF increments, so there is no quadrature error.
inline ErrorProfile error_profile(const DecisionRule& rule,
                                  const SignalModel& model) {
  if (const TwoPieceRule* r = std::get_if<TwoPieceRule>(&rule.rep())) {
    const double m = model.f1.cdf(r->threshold);
    const double l = model.f0.cdf(r->threshold);
    if (!(m > 0.0) || !(l < 1.0))
      throw std::domain_error(
          "two-piece threshold lies outside the signal support");
    // a*m + b*(1-m), arranged so constant rules come out exact.
    return {r->at_or_above + (r->below - r->at_or_above) * m,
            r->at_or_above + (r->below - r->at_or_above) * l};
  }
  const auto& r = std::get<TabulatedRule>(rule.rep());
  return {detail::tabulated_rate(r, model.f1),
          detail::tabulated_rate(r, model.f0)};
}

}  // namespace fairstakes
