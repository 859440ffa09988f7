#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <cmath>

#include "lod/diffusion.hpp"

using namespace lod;

namespace {

// E[(1-X)^n] under Wright's density from Kummer's function:
// int x^(A-1) (1-x)^(B+n-1) e^(2 sigma x) dx = B(A, B+n) 1F1(A; A+B+n; 2 sigma).
double kummer_moment(const DiffusionParams& p, int n) {
  const double a = 2.0 * p.theta * p.nu0;
  const double b = 2.0 * p.theta * p.nu1;
  using boost::math::beta;
  using boost::math::hypergeometric_1F1;
  const double top = beta(a, b + n) * hypergeometric_1F1(a, a + b + n, 2.0 * p.sigma);
  const double bottom = beta(a, b) * hypergeometric_1F1(a, a + b, 2.0 * p.sigma);
  return top / bottom;
}

}  // namespace

TEST(Drift, Formula) {
  const DiffusionParams p{2.0, 3.0, 0.25, 0.75};
  const double x = 0.4;
  EXPECT_DOUBLE_EQ(drift(p, x), 2.0 * x * (1 - x) + 3.0 * 0.25 * (1 - x) - 3.0 * 0.75 * x);
  EXPECT_DOUBLE_EQ(diffusion_coefficient(x), 0.5 * x * (1 - x));
  EXPECT_DOUBLE_EQ(default_time_step(DiffusionParams{10.0, 20.0, 0.5, 0.5}), 1e-3 / 20.0);
  EXPECT_DOUBLE_EQ(default_time_step(DiffusionParams{0.0, 0.1, 0.5, 0.5}), 1e-3);
}

TEST(SimulateWf, AbsorbingBoundaries) {
  RngStream rng(1, 0);
  EXPECT_EQ(simulate_wf(DiffusionParams{5.0, 2.0, 0.0, 1.0}, 0.0, 3.0, 1e-3, rng), 0.0);
  EXPECT_EQ(simulate_wf(DiffusionParams{5.0, 2.0, 1.0, 0.0}, 1.0, 3.0, 1e-3, rng), 1.0);
}

TEST(SimulateWf, NeutralIsMartingale) {
  const DiffusionParams p{0.0, 0.0, 0.5, 0.5};
  const double x = 0.3;
  const int reps = 100'000;
  double sum = 0.0;
  double squares = 0.0;
  for (int i = 0; i < reps; ++i) {
    RngStream rng(2, static_cast<std::uint64_t>(i));
    const double v = simulate_wf(p, x, 0.1, 1e-3, rng);
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum += v;
    squares += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((squares / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, x, 3.0 * se);
}

TEST(SimulateWf, VarianceGrowthMatchesGenerator) {
  // Neutral, no mutation: E[X_t(1-X_t)] = x(1-x) e^{-t}.
  const DiffusionParams p{0.0, 0.0, 0.5, 0.5};
  const double x = 0.5;
  const double t = 0.2;
  const int reps = 50'000;
  double sum = 0.0;
  double squares = 0.0;
  for (int i = 0; i < reps; ++i) {
    RngStream rng(3, static_cast<std::uint64_t>(i));
    const double v = simulate_wf(p, x, t, 1e-4, rng);
    sum += v * (1 - v);
    squares += v * (1 - v) * v * (1 - v);
  }
  const double mean = sum / reps;
  const double se = std::sqrt((squares / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, x * (1 - x) * std::exp(-t), 3.0 * se + 1e-4);
}

TEST(SimulateWf, PathRecordsEveryStep) {
  RngStream rng(4, 0);
  const DiffusionPath path = simulate_wf_path(DiffusionParams{1.0, 1.0, 0.5, 0.5}, 0.5, 0.0105, 1e-3, rng);
  ASSERT_EQ(path.times.size(), path.values.size());
  EXPECT_EQ(path.times.front(), 0.0);
  EXPECT_DOUBLE_EQ(path.times.back(), 0.0105);
  EXPECT_EQ(path.times.size(), 12u);
}

TEST(FixationProbability, Examples) {
  EXPECT_NEAR(fixation_probability(1.0, 0.5), (1 - std::exp(-1.0)) / (1 - std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(fixation_probability(1.0, 0.5), 0.731059, 1e-6);
  EXPECT_EQ(fixation_probability(3.0, 1.0), 1.0);
  EXPECT_EQ(fixation_probability(3.0, 0.0), 0.0);
  for (double x : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(fixation_probability(1e-12, x), x, 1e-10);
    EXPECT_EQ(fixation_probability(0.0, x), x);
  }
  EXPECT_NEAR(fixation_probability(500.0, 0.01), 1.0 - std::exp(-10.0), 1e-12);
}

TEST(WrightMoments, NeutralBetaMoments) {
  for (auto [theta, nu0] : {std::pair{0.5, 0.5}, {3.0, 0.2}, {20.0, 0.005}}) {
    const DiffusionParams p{0.0, theta, nu0, 1.0 - nu0};
    const WrightMoments m = wright_moments(p, 12);
    double product = 1.0;
    for (int n = 0; n <= 12; ++n) {
      EXPECT_NEAR(m.moments[static_cast<std::size_t>(n)], product, 1e-10) << "theta=" << theta << " n=" << n;
      product *= (2 * theta * (1 - nu0) + n) / (2 * theta + n);
    }
  }
  EXPECT_NEAR(wright_moments(DiffusionParams{0.0, 0.5, 0.5, 0.5}, 1).moments[1], 0.5, 1e-12);
  EXPECT_NEAR(wright_moments(DiffusionParams{0.0, 2.0, 0.5, 0.5}, 1).mean, 0.5, 1e-12);
}

TEST(WrightMoments, MatchKummerOracle) {
  for (auto p : {DiffusionParams{10.0, 20.0, 0.005, 0.995}, DiffusionParams{10.0, 5.0, 0.3, 0.7},
                 DiffusionParams{1.0, 0.5, 0.5, 0.5}, DiffusionParams{30.0, 15.0, 0.005, 0.995}}) {
    const WrightMoments m = wright_moments(p, 20);
    for (int n : {1, 2, 5, 10, 20}) {
      const double oracle = kummer_moment(p, n);
      EXPECT_NEAR(m.moments[static_cast<std::size_t>(n)] / oracle, 1.0, 1e-8) << p.sigma << " " << p.theta << " " << n;
    }
  }
}

TEST(WrightMoments, LargeSelectionStaysAccurate) {
  // sigma = 100 puts nearly all mass close to 1; E[X] follows from the
  // Kummer ratio.
  const DiffusionParams p{100.0, 50.0, 0.005, 0.995};
  const WrightMoments m = wright_moments(p, 5);
  EXPECT_NEAR(m.moments[1] / kummer_moment(p, 1), 1.0, 1e-8);
  EXPECT_NEAR(m.mean, 1.0 - m.moments[1], 1e-15);
}

TEST(WrightMoments, StructuralInvariants) {
  const DiffusionParams p{10.0, 20.0, 0.005, 0.995};
  const WrightMoments m = wright_moments(p, 50);
  EXPECT_EQ(m.moments[0], 1.0);
  EXPECT_LE(m.self_consistency, 1e-8);
  for (std::size_t n = 1; n < m.moments.size(); ++n) {
    EXPECT_GE(m.moments[n], 0.0);
    EXPECT_LE(m.moments[n], m.moments[n - 1]);
  }
  EXPECT_NEAR(m.normalizing_constant, std::exp(m.log_normalizing_constant), 1e-12 * m.normalizing_constant);
}

TEST(WrightMoments, FixedAndAdaptiveAgree) {
  const DiffusionParams p{10.0, 5.0, 0.3, 0.7};
  const WrightMoments coarse = wright_moments_fixed(p, 10, 200);
  const WrightMoments fine = wright_moments_fixed(p, 10, 400);
  for (std::size_t n = 0; n <= 10; ++n) EXPECT_NEAR(coarse.moments[n], fine.moments[n], 1e-8);
}

TEST(WrightMoments, RegimeErrors) {
  EXPECT_THROW(wright_moments(DiffusionParams{1.0, 0.0, 0.5, 0.5}, 3), RegimeError);
  EXPECT_THROW(wright_moments(DiffusionParams{1.0, 1.0, 0.0, 1.0}, 3), RegimeError);
  EXPECT_THROW(wright_moments(DiffusionParams{1.0, 1.0, 1.0, 0.0}, 3), RegimeError);
}

TEST(WrightExpectation, IdentityGivesMean) {
  const DiffusionParams p{10.0, 20.0, 0.005, 0.995};
  const double mean = wright_expectation(p, [](double x) { return x; });
  EXPECT_NEAR(mean, wright_moments(p, 1).mean, 1e-10);
  EXPECT_NEAR(wright_expectation(p, [](double) { return 1.0; }), 1.0, 1e-12);
}

TEST(SimulateWf, LongRunMeanMatchesStationaryMean) {
  const DiffusionParams p{1.0, 1.0, 0.5, 0.5};
  const int reps = 10'000;
  double sum = 0.0;
  double squares = 0.0;
  for (int i = 0; i < reps; ++i) {
    RngStream rng(5, static_cast<std::uint64_t>(i));
    const double v = simulate_wf(p, 0.5, 6.0, 2e-3, rng);
    sum += v;
    squares += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((squares / reps - mean * mean) / reps);
  EXPECT_NEAR(mean, wright_moments(p, 1).mean, 3.0 * se);
}
