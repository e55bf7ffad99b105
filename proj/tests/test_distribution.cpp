#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fairstakes/distribution.hpp"
#include "support.hpp"

using namespace fairstakes;
using Catch::Approx;

namespace {

ContinuousDistribution flat_spot_cdf() {
  // Flat on [2, 3] at p = 0.6.
  return PiecewiseLinearCdf{{0.0, 2.0, 3.0, 4.0}, {0.0, 0.6, 0.6, 1.0}};
}

}  // namespace

TEST_CASE("normal cdf reference values", "[distribution][cdf]") {
  CHECK(ContinuousDistribution(Normal{0.0, 1.0}).cdf(0.0) ==
        Approx(0.5).margin(1e-14));
  CHECK(ContinuousDistribution(Normal{1.0, 1.0}).cdf(0.0) ==
        Approx(0.158655).margin(1e-6));
  CHECK(ContinuousDistribution(Normal{0.0, 2.0}).cdf(2.0) ==
        Approx(0.841345).margin(1e-6));
}

TEST_CASE("normal cdf matches quadrature oracle", "[distribution][cdf]") {
  const struct {
    double mean, sd;
  } params[] = {{0.0, 1.0}, {1.0, 1.0}, {-2.0, 0.5}, {3.0, 2.5}};
  for (const auto& p : params) {
    const ContinuousDistribution dist(Normal{p.mean, p.sd});
    for (double z = -4.0; z <= 4.0; z += 0.5) {
      const double x = p.mean + z * p.sd;
      CHECK(dist.cdf(x) ==
            Approx(testsupport::normal_cdf_quadrature(p.mean, p.sd, x))
                .margin(1e-12));
    }
  }
}

TEST_CASE("piecewise cdf interpolates its knots", "[distribution][cdf]") {
  const ContinuousDistribution dist(
      PiecewiseLinearCdf{{0.0, 1.0, 3.0}, {0.0, 0.25, 1.0}});
  CHECK(dist.cdf(-1.0) == 0.0);
  CHECK(dist.cdf(0.0) == 0.0);
  CHECK(dist.cdf(1.0) == Approx(0.25).margin(1e-15));
  CHECK(dist.cdf(2.0) == Approx(0.625).margin(1e-15));
  CHECK(dist.cdf(3.0) == 1.0);
  CHECK(dist.cdf(10.0) == 1.0);
}

TEST_CASE("cdf is non-decreasing", "[distribution][property]") {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 50; ++trial) {
    const ContinuousDistribution dist =
        trial % 2 == 0 ? testsupport::random_normal(rng)
                       : testsupport::random_piecewise(rng, true);
    double prev = dist.cdf(-50.0);
    for (double x = -50.0; x <= 50.0; x += 0.5) {
      const double cur = dist.cdf(x);
      REQUIRE(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("invalid parameters are rejected", "[distribution]") {
  CHECK_THROWS_AS(ContinuousDistribution(Normal{0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ContinuousDistribution(Normal{0.0, -1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ContinuousDistribution(PiecewiseLinearCdf{{0.0, 0.0}, {0.0, 1.0}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ContinuousDistribution(PiecewiseLinearCdf{{0.0, 1.0}, {0.1, 1.0}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ContinuousDistribution(PiecewiseLinearCdf{{0.0, 1.0}, {0.0, 0.9}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ContinuousDistribution(PiecewiseLinearCdf{{1.0, 0.0}, {0.0, 1.0}}),
      std::invalid_argument);
}

TEST_CASE("quantile reference values", "[distribution][quantile]") {
  CHECK(ContinuousDistribution(Normal{1.0, 1.0}).quantile(0.5) ==
        Approx(1.0).margin(1e-9));
  CHECK(ContinuousDistribution(Normal{0.0, 1.0}).quantile(0.841345) ==
        Approx(1.0).margin(1e-5));
}

TEST_CASE("quantile on a flat spot returns the smallest attaining point",
          "[distribution][quantile]") {
  CHECK(flat_spot_cdf().quantile(0.6) == Approx(2.0).margin(1e-9));
}

TEST_CASE("quantile rejects p outside (0,1)", "[distribution][quantile]") {
  const ContinuousDistribution dist(Normal{0.0, 1.0});
  CHECK_THROWS_AS(dist.quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(dist.quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(dist.quantile(-0.1), std::domain_error);
  CHECK_THROWS_AS(dist.quantile(1.5), std::domain_error);
}

TEST_CASE("quantile-cdf round trip", "[distribution][property]") {
  std::mt19937_64 rng(92);
  for (int trial = 0; trial < 20; ++trial) {
    const ContinuousDistribution dist =
        trial % 2 == 0 ? testsupport::random_normal(rng)
                       : testsupport::random_piecewise(rng, false);
    const double lo = dist.quantile(0.001), hi = dist.quantile(0.999);
    for (int i = 0; i <= 40; ++i) {
      const double x = lo + (hi - lo) * i / 40.0;
      const double p = dist.cdf(x);
      if (!(p > 0.0 && p < 1.0)) continue;
      REQUIRE(dist.quantile(p) == Approx(x).margin(1e-8));
      REQUIRE(dist.cdf(dist.quantile(p)) == Approx(p).margin(1e-10));
    }
  }
}

TEST_CASE("sampling is deterministic given the seed", "[distribution][sample]") {
  const ContinuousDistribution dist(Normal{2.0, 3.0});
  std::mt19937_64 a(7), b(7);
  for (int i = 0; i < 100; ++i) REQUIRE(dist.sample(a) == dist.sample(b));
}

TEST_CASE("sample mean obeys the CLT bound", "[distribution][sample]") {
  const ContinuousDistribution dist(Normal{0.0, 1.0});
  std::mt19937_64 rng(1234);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += dist.sample(rng);
  CHECK(std::fabs(sum / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("piecewise samples pass a KS check against their own CDF",
          "[distribution][sample]") {
  const ContinuousDistribution dist(
      PiecewiseLinearCdf{{-1.0, 0.0, 0.5, 2.0}, {0.0, 0.3, 0.45, 1.0}});
  std::mt19937_64 rng(99);
  std::vector<double> draws(1000000);
  for (double& d : draws) d = dist.sample(rng);
  const double ks = testsupport::ks_statistic(
      std::move(draws), [&](double x) { return dist.cdf(x); });
  CHECK(ks < 0.002);
}

TEST_CASE("mlrp verification", "[distribution][mlrp]") {
  std::vector<double> grid;
  for (double s = -4.0; s <= 4.0 + 1e-12; s += 0.01) grid.push_back(s);

  const ContinuousDistribution n01(Normal{0.0, 1.0});
  const ContinuousDistribution n11(Normal{1.0, 1.0});

  SECTION("separated means pass") {
    const MlrpReport r = verify_mlrp(SignalModel{n01, n11}, grid);
    CHECK(r.pass);
    CHECK(r.min_margin > 0.0);
  }
  SECTION("identical distributions fail with zero margin") {
    const MlrpReport r = verify_mlrp(SignalModel{n01, n01}, grid);
    CHECK_FALSE(r.pass);
    CHECK(r.min_margin == Approx(0.0).margin(1e-15));
  }
  SECTION("reversed ordering fails") {
    CHECK_FALSE(verify_mlrp(SignalModel{n11, n01}, grid).pass);
  }
  SECTION("empty grid is rejected") {
    CHECK_THROWS_AS(verify_mlrp(SignalModel{n01, n11}, {}),
                    std::invalid_argument);
  }
}

TEST_CASE("dominance classification of the example cost pairs",
          "[distribution][dominance]") {
  const ContinuousDistribution x1(Normal{0.0, 1.0});
  const ContinuousDistribution y1(Normal{1.0, 1.0});
  const ContinuousDistribution x2(Normal{0.0, 2.0});
  const ContinuousDistribution y3(Normal{-1.0, 1.0});

  SECTION("uniformly higher costs dominate") {
    CHECK(classify_dominance(x1, y1).tag == DominanceTag::SecondDominatesFirst);
    CHECK(classify_dominance(y1, x1).tag == DominanceTag::FirstDominatesSecond);
  }
  SECTION("unequal spreads cross at 2") {
    const DominanceVerdict v = classify_dominance(x2, y1);
    REQUIRE(v.tag == DominanceTag::Crossing);
    REQUIRE(v.crossings.size() == 1);
    CHECK(v.crossings[0] == Approx(2.0).margin(1e-8));
    CHECK(std::fabs(x2.cdf(v.crossings[0]) - y1.cdf(v.crossings[0])) <=
          1e-10);
  }
  SECTION("unequal spreads cross at -2") {
    const DominanceVerdict v = classify_dominance(x2, y3);
    REQUIRE(v.tag == DominanceTag::Crossing);
    REQUIRE(v.crossings.size() == 1);
    CHECK(v.crossings[0] == Approx(-2.0).margin(1e-8));
  }
  SECTION("a distribution never dominates itself") {
    CHECK(classify_dominance(x1, x1).tag ==
          DominanceTag::IdenticalWithinTolerance);
  }
  SECTION("too-narrow explicit brackets are rejected") {
    CHECK_THROWS_AS(classify_dominance(x1, y1, Interval{-1.0, 1.0}),
                    std::domain_error);
  }
}

TEST_CASE("dominance classification is antisymmetric under swap",
          "[distribution][dominance][property]") {
  std::mt19937_64 rng(93);
  for (int trial = 0; trial < 40; ++trial) {
    const ContinuousDistribution a = testsupport::random_normal(rng);
    const ContinuousDistribution b = testsupport::random_normal(rng);
    const DominanceVerdict ab = classify_dominance(a, b);
    const DominanceVerdict ba = classify_dominance(b, a);
    switch (ab.tag) {
      case DominanceTag::FirstDominatesSecond:
        REQUIRE(ba.tag == DominanceTag::SecondDominatesFirst);
        break;
      case DominanceTag::SecondDominatesFirst:
        REQUIRE(ba.tag == DominanceTag::FirstDominatesSecond);
        break;
      default:
        REQUIRE(ba.tag == ab.tag);
        break;
    }
    REQUIRE(ab.crossings.size() == ba.crossings.size());
    for (std::size_t i = 0; i < ab.crossings.size(); ++i)
      REQUIRE(ab.crossings[i] == ba.crossings[i]);
  }
}

TEST_CASE("reported crossings satisfy the CDF-equality tolerance",
          "[distribution][dominance][property]") {
  std::mt19937_64 rng(94);
  int found = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const ContinuousDistribution a = testsupport::random_normal(rng);
    const ContinuousDistribution b = testsupport::random_normal(rng);
    const DominanceVerdict v = classify_dominance(a, b);
    for (double c : v.crossings) {
      REQUIRE(std::fabs(a.cdf(c) - b.cdf(c)) <= 1e-10);
      ++found;
    }
  }
  CHECK(found > 10);  // the generator produces plenty of crossing pairs
}
