// Continuous univariate distributions for compliance costs and signals:
// normal and piecewise-linear CDFs with quantiles and inverse-transform
// sampling, plus MLRP verification and CDF dominance classification.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "fairstakes/errors.hpp"

namespace fairstakes {

struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};

// Continuous CDF interpolated linearly between (x, p) knots; p runs from 0
// at the first knot to 1 at the last. The support is [x.front(), x.back()].
struct PiecewiseLinearCdf {
  std::vector<double> x;
  std::vector<double> p;
};

namespace detail {

// Uniform draw in (0, 1) from a full-range 64-bit generator.
template <class Rng>
double unit_open(Rng& rng) {
  static_assert(Rng::min() == 0 &&
                    Rng::max() == std::numeric_limits<std::uint64_t>::max(),
                "sampling expects a full-range 64-bit generator");
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-53;
}

}  // namespace detail

class ContinuousDistribution {
 public:
  ContinuousDistribution(Normal n) : rep_(n) { validate(); }
  ContinuousDistribution(PiecewiseLinearCdf pw) : rep_(std::move(pw)) {
    validate();
  }

  double cdf(double x) const {
    if (const Normal* n = std::get_if<Normal>(&rep_)) {
      const double z = (x - n->mean) / n->sd;
      return 0.5 * std::erfc(-z / std::numbers::sqrt2);
    }
    const auto& pw = std::get<PiecewiseLinearCdf>(rep_);
    if (x <= pw.x.front()) return x == pw.x.front() ? pw.p.front() : 0.0;
    if (x >= pw.x.back()) return 1.0;
    const auto it = std::upper_bound(pw.x.begin(), pw.x.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - pw.x.begin());
    const double t = (x - pw.x[i - 1]) / (pw.x[i] - pw.x[i - 1]);
    return pw.p[i - 1] + t * (pw.p[i] - pw.p[i - 1]);
  }

  double density(double x) const {
    if (const Normal* n = std::get_if<Normal>(&rep_)) {
      const double z = (x - n->mean) / n->sd;
      return std::exp(-0.5 * z * z) /
             (n->sd * std::sqrt(2.0 * std::numbers::pi));
    }
    const auto& pw = std::get<PiecewiseLinearCdf>(rep_);
    if (x < pw.x.front() || x >= pw.x.back()) return 0.0;
    const auto it = std::upper_bound(pw.x.begin(), pw.x.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - pw.x.begin());
    return (pw.p[i] - pw.p[i - 1]) / (pw.x[i] - pw.x[i - 1]);
  }

  // Left-continuous generalized inverse: the smallest x with cdf(x) >= p.
  // Bracketed bisection with geometric bracket expansion.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
      throw std::domain_error("quantile: p must lie in (0, 1)");
    double lo, hi;
    if (const Normal* n = std::get_if<Normal>(&rep_)) {
      double step = 8.0 * n->sd;
      lo = n->mean - step;
      while (cdf(lo) >= p) {
        lo -= step;
        step *= 2.0;
      }
      step = 8.0 * n->sd;
      hi = n->mean + step;
      while (cdf(hi) < p) {
        hi += step;
        step *= 2.0;
      }
    } else {
      const auto& pw = std::get<PiecewiseLinearCdf>(rep_);
      lo = pw.x.front();
      hi = pw.x.back();
      if (cdf(lo) >= p) return lo;
    }
    // Invariant: cdf(lo) < p <= cdf(hi). On flat spots this converges to the
    // smallest attaining point.
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      if (cdf(mid) >= p)
        hi = mid;
      else
        lo = mid;
      const double scale =
          std::max({1.0, std::fabs(lo), std::fabs(hi)});
      if (hi - lo <= 1e-15 * scale) break;
    }
    return hi;
  }

  template <class Rng>
  double sample(Rng& rng) const {
    return quantile(detail::unit_open(rng));
  }

  bool is_normal() const { return std::holds_alternative<Normal>(rep_); }
  const std::variant<Normal, PiecewiseLinearCdf>& rep() const { return rep_; }

 private:
  void validate() const {
    if (const Normal* n = std::get_if<Normal>(&rep_)) {
      if (!std::isfinite(n->mean) || !std::isfinite(n->sd) || n->sd <= 0.0)
        throw std::invalid_argument(
            "normal distribution requires finite mean and sd > 0");
      return;
    }
    const auto& pw = std::get<PiecewiseLinearCdf>(rep_);
    if (pw.x.size() < 2 || pw.x.size() != pw.p.size())
      throw std::invalid_argument(
          "piecewise CDF requires at least two (x, p) knots");
    for (std::size_t i = 0; i < pw.x.size(); ++i) {
      if (!std::isfinite(pw.x[i]) || !std::isfinite(pw.p[i]))
        throw std::invalid_argument("piecewise CDF knots must be finite");
      if (i > 0 && !(pw.x[i] > pw.x[i - 1]))
        throw std::invalid_argument(
            "piecewise CDF knot positions must be strictly increasing");
      if (i > 0 && pw.p[i] < pw.p[i - 1])
        throw std::invalid_argument(
            "piecewise CDF probabilities must be non-decreasing");
    }
    if (pw.p.front() != 0.0 || pw.p.back() != 1.0)
      throw std::invalid_argument(
          "piecewise CDF probabilities must run from 0 to 1");
  }

  std::variant<Normal, PiecewiseLinearCdf> rep_;
};

// Behavior-conditional signal distributions for one group.
struct SignalModel {
  ContinuousDistribution f0;  // signal CDF given non-compliant behavior
  ContinuousDistribution f1;  // signal CDF given compliant behavior
};

inline constexpr double kMlrpTolerance = 1e-12;

struct MlrpReport {
  bool pass = false;
  double min_margin = 0.0;  // worst F0(s) - F1(s) over interior grid points
  double argmin = 0.0;
};

// MLRP via the CDF ordering F0(s) > F1(s), checked on the interior of the
// supplied sorted grid.
inline MlrpReport verify_mlrp(const SignalModel& model,
                              std::span<const double> grid) {
  if (grid.empty())
    throw std::invalid_argument("verify_mlrp: grid must be non-empty");
  std::size_t first = 0, last = grid.size();
  if (grid.size() >= 3) {
    first = 1;
    last = grid.size() - 1;
  }
  MlrpReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i < last; ++i) {
    const double margin = model.f0.cdf(grid[i]) - model.f1.cdf(grid[i]);
    if (margin < report.min_margin) {
      report.min_margin = margin;
      report.argmin = grid[i];
    }
  }
  report.pass = report.min_margin > kMlrpTolerance;
  return report;
}

// Uniform verification grid over the joint 0.001/0.999 quantile hull.
inline std::vector<double> mlrp_grid(const SignalModel& model, int n = 1025) {
  if (n < 3) throw std::invalid_argument("mlrp_grid: need at least 3 points");
  const double lo =
      std::min(model.f0.quantile(0.001), model.f1.quantile(0.001));
  const double hi =
      std::max(model.f0.quantile(0.999), model.f1.quantile(0.999));
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return grid;
}

enum class DominanceTag {
  FirstDominatesSecond,   // H_first <= H_second everywhere (first has higher costs)
  SecondDominatesFirst,   // H_second <= H_first everywhere
  Crossing,
  IdenticalWithinTolerance,
};

struct DominanceVerdict {
  DominanceTag tag = DominanceTag::IdenticalWithinTolerance;
  std::vector<double> crossings;  // ascending; non-empty only for Crossing
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kDominanceEpsilon = 1e-9;
inline constexpr double kCrossingTolerance = 1e-10;
inline constexpr int kDominanceGridSize = 4097;

namespace detail {

// Bisect a root of `diff` on [lo, hi], given diff(lo) = dlo and a strict sign
// change across the interval. Symmetric under diff -> -diff, so dominance
// classification is antisymmetric under argument swap.
template <class Fn>
double refine_crossing(const Fn& diff, double lo, double hi, double dlo) {
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double dm = diff(mid);
    if (std::fabs(dm) <= kCrossingTolerance) return mid;
    if ((dm > 0.0) == (dlo > 0.0)) {
      lo = mid;
      dlo = dm;
    } else {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace detail

// Classifies the pointwise order of two cost CDFs over a bracket that covers
// essentially all mass of both. Sign changes of H_first - H_second are
// refined to |H_first - H_second| <= kCrossingTolerance.
inline DominanceVerdict classify_dominance(
    const ContinuousDistribution& hx, const ContinuousDistribution& hy,
    std::optional<Interval> bracket = std::nullopt,
    int grid_n = kDominanceGridSize) {
  if (grid_n < 3)
    throw std::invalid_argument("classify_dominance: need at least 3 points");
  Interval b;
  if (bracket) {
    b = *bracket;
    if (!(hx.cdf(b.lo) < 0.001 && hy.cdf(b.lo) < 0.001 &&
          hx.cdf(b.hi) > 0.999 && hy.cdf(b.hi) > 0.999))
      throw std::domain_error(
          "classify_dominance: bracket too narrow for both CDFs");
  } else {
    b.lo = std::min(hx.quantile(1e-4), hy.quantile(1e-4));
    b.hi = std::max(hx.quantile(0.9999), hy.quantile(0.9999));
  }
  const auto diff = [&](double c) { return hx.cdf(c) - hy.cdf(c); };

  const std::size_t n = static_cast<std::size_t>(grid_n);
  std::vector<double> t(n), d(n);
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = b.lo + (b.hi - b.lo) * static_cast<double>(i) /
                      static_cast<double>(n - 1);
    d[i] = diff(t[i]);
    has_pos = has_pos || d[i] > kDominanceEpsilon;
    has_neg = has_neg || d[i] < -kDominanceEpsilon;
  }
  if (!has_pos && !has_neg)
    return {DominanceTag::IdenticalWithinTolerance, {}};
  // d > 0 means H_first sits above H_second, i.e. the second distribution
  // puts more mass on high values: the second dominates.
  if (has_pos && !has_neg) return {DominanceTag::SecondDominatesFirst, {}};
  if (has_neg && !has_pos) return {DominanceTag::FirstDominatesSecond, {}};

  DominanceVerdict verdict;
  verdict.tag = DominanceTag::Crossing;
  std::ptrdiff_t prev = -1;  // last grid index with |d| > epsilon
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(d[i]) <= kDominanceEpsilon) continue;
    if (prev >= 0) {
      const std::size_t j = static_cast<std::size_t>(prev);
      if ((d[j] > 0.0) != (d[i] > 0.0))
        verdict.crossings.push_back(
            detail::refine_crossing(diff, t[j], t[i], d[j]));
    }
    prev = static_cast<std::ptrdiff_t>(i);
  }
  return verdict;
}

}  // namespace fairstakes
