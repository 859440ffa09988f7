#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "lod/model.hpp"

using namespace lod;

TEST(Validate, AcceptsErrorThresholdParameters) {
  const DetParams p = validate(DetParams{0.001, 0.002, 0.0, 1.0});
  EXPECT_EQ(p.nu0, 0.0);
  EXPECT_EQ(p.nu1, 1.0);
}

TEST(Validate, RejectsMutationTargetsNotSummingToOne) {
  try {
    validate(DetParams{0.1, 0.1, 0.7, 0.7});
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& e) {
    EXPECT_EQ(e.field(), "nu0+nu1");
  }
}

TEST(Validate, AcceptsAllZeroDiffusionRates) {
  EXPECT_NO_THROW(validate(DiffusionParams{0.0, 0.0, 0.5, 0.5}));
}

TEST(Validate, RejectsNegativeAndNonFinite) {
  EXPECT_THROW(validate(DetParams{-0.1, 0.1, 0.5, 0.5}), ParameterError);
  EXPECT_THROW(validate(DetParams{0.1, -1.0, 0.5, 0.5}), ParameterError);
  EXPECT_THROW(validate(DiffusionParams{std::nan(""), 1.0, 0.5, 0.5}), ParameterError);
  EXPECT_THROW(validate(DiffusionParams{1.0, std::numeric_limits<double>::infinity(), 0.5, 0.5}), ParameterError);
  EXPECT_THROW(validate(DetParams{0.1, 0.1, 1.5, -0.5}), ParameterError);
  MoranParams m;
  m.population_size = 0;
  EXPECT_THROW(validate(m), ParameterError);
}

TEST(Validate, NormalizesNearlySummingTargets) {
  const DetParams p = validate(DetParams{0.1, 0.1, 0.3, 0.7 + 1e-14});
  EXPECT_EQ(p.nu0 + p.nu1, 1.0);
  EXPECT_THROW(validate(DetParams{0.1, 0.1, 0.3, 0.7 + 1e-9}), ParameterError);
}

TEST(Validate, IsIdempotent) {
  for (double nu0 : {0.0, 0.005, 0.1, 0.3, 0.7, 1.0}) {
    const DetParams once = validate(DetParams{0.2, 0.3, nu0, 1.0 - nu0});
    const DetParams twice = validate(once);
    EXPECT_EQ(once.nu0, twice.nu0);
    EXPECT_EQ(once.nu1, twice.nu1);
    EXPECT_EQ(once.s, twice.s);
    EXPECT_EQ(once.u, twice.u);
  }
}

TEST(ScaleToDiffusion, Examples) {
  MoranParams m;
  m.population_size = 10'000;
  m.s = 0.001;
  m.u = 0.002;
  DiffusionParams d = scale_to_diffusion(m);
  EXPECT_DOUBLE_EQ(d.sigma, 10.0);
  EXPECT_DOUBLE_EQ(d.theta, 20.0);

  m.population_size = 30'000;
  m.u = 0.0005;
  d = scale_to_diffusion(m);
  EXPECT_DOUBLE_EQ(d.sigma, 30.0);
  EXPECT_DOUBLE_EQ(d.theta, 15.0);

  m.s = 0.0;
  EXPECT_EQ(scale_to_diffusion(m).sigma, 0.0);
}

TEST(ScaleToDiffusion, PreservesMutationTargetsExactly) {
  MoranParams m;
  m.population_size = 123;
  m.s = 0.01;
  m.u = 0.02;
  for (double nu0 : {0.0, 0.005, 0.25, 0.999}) {
    m.nu0 = nu0;
    m.nu1 = 1.0 - nu0;
    const DiffusionParams d = scale_to_diffusion(m);
    EXPECT_EQ(d.nu0, m.nu0);
    EXPECT_EQ(d.nu1, m.nu1);
  }
}

TEST(MoranParams, BirthAndDeathRatesPerMode) {
  MoranParams m;
  m.population_size = 10;
  m.s = 0.2;
  m.selection_mode = SelectionMode::fecundity;
  EXPECT_DOUBLE_EQ(m.birth_rate(0), 0.7);
  EXPECT_DOUBLE_EQ(m.birth_rate(1), 0.5);
  m.selection_mode = SelectionMode::viability;
  EXPECT_DOUBLE_EQ(m.death_rate(1), 0.7);
  EXPECT_DOUBLE_EQ(m.death_rate(0), 0.5);
}

TEST(Enums, ParseAndPrint) {
  EXPECT_EQ(parse_limit("det"), Limit::deterministic);
  EXPECT_EQ(parse_limit("diffusion"), Limit::diffusion);
  EXPECT_EQ(parse_selection_mode("viability"), SelectionMode::viability);
  EXPECT_STREQ(to_string(SelectionMode::fecundity), "fecundity");
  EXPECT_THROW(parse_limit("nope"), ParameterError);
}

TEST(KeyValues, SkipsCommentsAndTrims) {
  std::istringstream in("# header\n s = 0.5 \n\nu=2\nu=3\n");
  const auto kv = parse_key_values(in);
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("s"), "0.5");
  EXPECT_EQ(kv.at("u"), "3");
}
