// Test-only oracles and random input generators. The oracles stay
// independent of the library code paths they check: the normal CDF oracle
// integrates the density, the argmax oracle is a plain grid scan.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fairstakes/classifier.hpp"
#include "fairstakes/distribution.hpp"

namespace testsupport {

// Composite-Simpson integral of the normal density from mean - 12 sd to x.
inline double normal_cdf_quadrature(double mean, double sd, double x) {
  const double lo = mean - 12.0 * sd;
  if (x <= lo) return 0.0;
  const int n = 20000;  // even
  const double h = (x - lo) / n;
  const auto density = [&](double t) {
    const double z = (t - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
  };
  double sum = density(lo) + density(x);
  for (int i = 1; i < n; ++i)
    sum += density(lo + i * h) * (i % 2 != 0 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

template <class Fn>
double grid_argmax(const Fn& f, double lo, double hi, int n) {
  double best_x = lo;
  double best = f(lo);
  for (int i = 1; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

template <class Cdf>
double ks_statistic(std::vector<double> samples, const Cdf& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n,
                  static_cast<double>(i + 1) / n - f});
  }
  return d;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline fairstakes::ContinuousDistribution random_normal(std::mt19937_64& rng,
                                                        double mean_lo = -3.0,
                                                        double mean_hi = 3.0,
                                                        double sd_lo = 0.3,
                                                        double sd_hi = 3.0) {
  return fairstakes::Normal{uniform(rng, mean_lo, mean_hi),
                            uniform(rng, sd_lo, sd_hi)};
}

// Random piecewise-linear CDF; with flat_spots, some segments carry no mass.
inline fairstakes::ContinuousDistribution random_piecewise(
    std::mt19937_64& rng, bool flat_spots = false) {
  const int knots = std::uniform_int_distribution<int>(3, 9)(rng);
  fairstakes::PiecewiseLinearCdf pw;
  double x = uniform(rng, -5.0, 0.0);
  std::vector<double> weights;
  for (int i = 0; i < knots; ++i) {
    pw.x.push_back(x);
    x += uniform(rng, 0.1, 2.0);
    if (i + 1 < knots) {
      const bool flat =
          flat_spots && std::bernoulli_distribution(0.3)(rng) && i > 0;
      weights.push_back(flat ? 0.0 : uniform(rng, 0.05, 1.0));
    }
  }
  double total = 0.0;
  for (double w : weights) total += w;
  pw.p.push_back(0.0);
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    pw.p.push_back(i + 1 == weights.size() ? 1.0 : cum / total);
  }
  return pw;
}

// Equal-sd normal pair, so the CDF ordering holds on the whole line.
inline fairstakes::SignalModel random_signal_model(std::mt19937_64& rng,
                                                   double min_gap = 0.2,
                                                   double max_gap = 3.0) {
  const double sd = uniform(rng, 0.5, 2.0);
  const double mean0 = uniform(rng, -1.0, 1.0);
  const double gap = uniform(rng, min_gap, max_gap);
  return {fairstakes::ContinuousDistribution(fairstakes::Normal{mean0, sd}),
          fairstakes::ContinuousDistribution(
              fairstakes::Normal{mean0 + gap, sd})};
}

inline fairstakes::ErrorProfile random_informative_profile(
    std::mt19937_64& rng) {
  const double fpr = uniform(rng, 0.0, 0.9);
  const double tpr = uniform(rng, fpr + 0.01, 1.0);
  return {tpr, fpr};
}

}  // namespace testsupport
