#include <gtest/gtest.h>

#include <cmath>

#include "lod/ctmc.hpp"
#include "lod/killed_asg.hpp"

using namespace lod;

namespace {

GeneratorSpec pure_death() {
  return GeneratorSpec([](State s, std::vector<Transition>& out) {
    if (s.value > 0) out.push_back({State{s.value - 1}, static_cast<double>(s.value)});
  });
}

GeneratorSpec two_state(double a, double b) {
  return GeneratorSpec([a, b](State s, std::vector<Transition>& out) {
    if (s.value == 0) out.push_back({State{1}, a});
    if (s.value == 1) out.push_back({State{0}, b});
  });
}

GeneratorSpec birth_death(double up, double down) {
  return GeneratorSpec([up, down](State s, std::vector<Transition>& out) {
    if (s.value <= 0) return;
    out.push_back({State{s.value + 1}, up});
    out.push_back({State{s.value - 1}, down});
  });
}

GeneratorSpec reflected_walk(double up, double down) {
  return GeneratorSpec([up, down](State s, std::vector<Transition>& out) {
    out.push_back({State{s.value + 1}, up});
    if (s.value > 1) out.push_back({State{s.value - 1}, down});
  });
}

}  // namespace

TEST(GeneratorSpec, DropsZeroRatesAndRejectsNegative) {
  GeneratorSpec spec([](State s, std::vector<Transition>& out) {
    out.push_back({State{s.value + 1}, 0.0});
    out.push_back({State{s.value + 2}, 1.0});
  });
  const auto t = spec.transitions(State{0});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].target, State{2});

  GeneratorSpec bad([](State, std::vector<Transition>& out) { out.push_back({State{1}, -1.0}); });
  EXPECT_THROW(bad.transitions(State{0}), std::invalid_argument);
}

TEST(GeneratorSpec, CemeteryIsAbsorbing) {
  GeneratorSpec spec([](State, std::vector<Transition>& out) { out.push_back({State{3}, 1.0}); });
  EXPECT_TRUE(spec.is_absorbing(State::cemetery()));
  EXPECT_TRUE(spec.transitions(State::cemetery()).empty());
  EXPECT_FALSE(spec.is_absorbing(State{0}));
}

TEST(SimulateCtmc, AbsorbingStartGivesTrivialPath) {
  RngStream rng(1, 0);
  const CtmcRun run = simulate_ctmc(pure_death(), State{0}, StopRule{}, rng);
  ASSERT_EQ(run.path.size(), 1u);
  EXPECT_EQ(run.path[0].time, 0.0);
  EXPECT_EQ(run.path[0].state, State{0});
  EXPECT_EQ(run.status, RunStatus::absorbed);
}

TEST(SimulateCtmc, PureDeathEndsInZero) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    RngStream rng(2, i);
    const CtmcRun run = simulate_ctmc(pure_death(), State{3}, StopRule{}, rng);
    ASSERT_EQ(run.final_state, State{0});
    ASSERT_EQ(run.events, 3u);
    ASSERT_EQ(run.status, RunStatus::absorbed);
  }
}

TEST(SimulateCtmc, SameStreamReproducesPathExactly) {
  RngStream a(3, 5);
  RngStream b(3, 5);
  StopRule stop;
  stop.horizon = 50.0;
  const CtmcRun r1 = simulate_ctmc(birth_death(1.0, 1.2), State{4}, stop, a);
  const CtmcRun r2 = simulate_ctmc(birth_death(1.0, 1.2), State{4}, stop, b);
  ASSERT_EQ(r1.path.size(), r2.path.size());
  for (std::size_t k = 0; k < r1.path.size(); ++k) {
    EXPECT_EQ(r1.path[k].time, r2.path[k].time);
    EXPECT_EQ(r1.path[k].state, r2.path[k].state);
  }
}

TEST(SimulateCtmc, TwoStateOccupancy) {
  // Stationary P(state 0) = b / (a + b) = 0.75; batch means give the SE.
  const double a = 1.0;
  const double b = 3.0;
  const int batches = 100;
  const double batch_length = 1000.0;
  RngStream rng(4, 0);
  State state{0};
  std::vector<double> fractions;
  for (int k = 0; k < batches; ++k) {
    StopRule stop;
    stop.horizon = batch_length;
    stop.max_events = 100'000'000;
    const CtmcRun run = simulate_ctmc(two_state(a, b), state, stop, rng);
    double in_zero = 0.0;
    for (std::size_t j = 0; j < run.path.size(); ++j) {
      const double end = j + 1 < run.path.size() ? run.path[j + 1].time : batch_length;
      if (run.path[j].state == State{0}) in_zero += end - run.path[j].time;
    }
    fractions.push_back(in_zero / batch_length);
    state = run.final_state;
  }
  double mean = 0.0;
  for (double f : fractions) mean += f;
  mean /= batches;
  double var = 0.0;
  for (double f : fractions) var += (f - mean) * (f - mean);
  const double se = std::sqrt(var / (batches - 1) / batches);
  EXPECT_NEAR(mean, 0.75, 3.0 * se);
}

TEST(SimulateCtmc, HoldingTimeMeanMatchesExitRate) {
  // At state 2 the exit rate is up + down = 2.5.
  RngStream rng(6, 0);
  StopRule stop;
  stop.horizon = 40'000.0;
  stop.max_events = 100'000'000;
  const CtmcRun run = simulate_ctmc(reflected_walk(1.0, 1.5), State{2}, stop, rng);
  double sum = 0.0;
  double squares = 0.0;
  std::uint64_t visits = 0;
  for (std::size_t j = 0; j + 1 < run.path.size(); ++j) {
    if (run.path[j].state != State{2}) continue;
    const double h = run.path[j + 1].time - run.path[j].time;
    sum += h;
    squares += h * h;
    ++visits;
  }
  ASSERT_GE(visits, 10'000u);
  const double mean = sum / visits;
  const double se = std::sqrt((squares / visits - mean * mean) / visits);
  EXPECT_NEAR(mean, 1.0 / 2.5, 3.0 * se);
}

TEST(SimulateCtmc, StopRules) {
  RngStream rng(7, 0);
  StopRule stop;
  stop.state_cap = 50;
  const CtmcRun diverged = simulate_ctmc(birth_death(2.0, 0.1), State{1}, stop, rng);
  EXPECT_EQ(diverged.status, RunStatus::diverged);
  EXPECT_EQ(diverged.final_state, State{50});

  StopRule few;
  few.max_events = 5;
  const CtmcRun capped = simulate_ctmc(birth_death(1.0, 1.0), State{100}, few, rng);
  EXPECT_EQ(capped.status, RunStatus::event_cap);
  EXPECT_EQ(capped.events, 5u);

  StopRule horizon;
  horizon.horizon = 0.5;
  const CtmcRun timed = simulate_ctmc(birth_death(0.1, 0.1), State{1000}, horizon, rng);
  EXPECT_EQ(timed.status, RunStatus::horizon);
  EXPECT_EQ(timed.final_time, 0.5);
}

TEST(EstimateAbsorption, StartAtTarget) {
  const AbsorptionReport report = estimate_absorption(pure_death(), State{0}, 1000, StopRule{}, 1);
  EXPECT_EQ(report.frequency(State{0}), 1.0);
  EXPECT_EQ(report.standard_error(State{0}), 0.0);
}

TEST(EstimateAbsorption, KilledAsgDiesOutWhenMutationDominates) {
  // u >= s with nu1 = 1: the line count dies out almost surely.
  const auto spec = killed_asg_generator(DetParams{1.0, 2.0, 0.0, 1.0});
  const AbsorptionReport report = estimate_absorption(spec, State{1}, 20'000, StopRule{}, 2);
  EXPECT_EQ(report.frequency(State{0}) + report.censored_fraction() + report.diverged_fraction(), 1.0);
  EXPECT_LT(report.diverged_fraction() + report.censored_fraction(), 1e-3);
  EXPECT_GT(report.frequency(State{0}), 0.999);
}

TEST(EstimateAbsorption, GamblersRuinProbability) {
  // s = 1, u = 0.5, nu1 = 1: P(absorb in 0 from 1) = u / s = 0.5.
  const auto spec = killed_asg_generator(DetParams{1.0, 0.5, 0.0, 1.0});
  StopRule caps;
  caps.state_cap = 1000;
  const AbsorptionReport report = estimate_absorption(spec, State{1}, 50'000, caps, 3);
  EXPECT_NEAR(report.frequency(State{0}), 0.5, 3.0 * report.standard_error(State{0}));
  EXPECT_EQ(report.frequency(State{0}) + report.diverged_fraction() + report.censored_fraction(), 1.0);
}

TEST(EstimateAbsorption, IndependentOfThreadCount) {
  const auto spec = killed_asg_generator(DiffusionParams{2.0, 1.0, 0.3, 0.7});
  const AbsorptionReport one = estimate_absorption(spec, State{2}, 5000, StopRule{}, 9, 1);
  const AbsorptionReport four = estimate_absorption(spec, State{2}, 5000, StopRule{}, 9, 4);
  EXPECT_EQ(one.absorbed(), four.absorbed());
  EXPECT_EQ(one.diverged(), four.diverged());
}

TEST(AbsorptionReport, MergeIsOrderIndependent) {
  AbsorptionReport a;
  AbsorptionReport b;
  a.record(RunStatus::absorbed, State{0});
  a.record(RunStatus::diverged, State{10});
  b.record(RunStatus::absorbed, State::cemetery());
  b.record(RunStatus::event_cap, State{3});
  AbsorptionReport ab = a;
  ab.merge(b);
  AbsorptionReport ba = b;
  ba.merge(a);
  EXPECT_EQ(ab.absorbed(), ba.absorbed());
  EXPECT_EQ(ab.replicates(), 4u);
  EXPECT_EQ(ab.frequency(State{0}), 0.25);
  EXPECT_EQ(ab.censored_fraction(), 0.25);
  EXPECT_EQ(ab.diverged_fraction(), 0.25);
}
