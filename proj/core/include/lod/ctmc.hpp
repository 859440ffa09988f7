#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lod/rng.hpp"

namespace lod {

/// State of a line-counting chain: a non-negative count or the cemetery.
struct State {
  static constexpr std::int64_t kCemeteryValue = -1;

  std::int64_t value = 0;

  static constexpr State cemetery() { return State{kCemeteryValue}; }
  constexpr bool is_cemetery() const { return value == kCemeteryValue; }

  friend constexpr auto operator<=>(const State&, const State&) = default;
};

std::string to_string(State state);

struct Transition {
  State target;
  double rate = 0.0;
};

/// Describes a continuous-time Markov chain on N ∪ {Δ} by its outgoing
/// transitions. A state with no positive-rate transition is absorbing; the
/// cemetery is always absorbing.
class GeneratorSpec {
 public:
  /// Appends the transitions out of a state to `out` (which arrives empty).
  using RateFn = std::function<void(State, std::vector<Transition>& out)>;

  explicit GeneratorSpec(RateFn rates) : rates_(std::move(rates)) {}

  /// Fills `out` with the positive-rate transitions out of `state`.
  /// Throws std::invalid_argument on a negative or non-finite rate.
  void transitions(State state, std::vector<Transition>& out) const;
  std::vector<Transition> transitions(State state) const;

  bool is_absorbing(State state) const;

 private:
  RateFn rates_;
};

/// Stop rule for a single run. The run ends at the first of: absorption,
/// the time horizon, reaching `state_cap` (reported as divergence), or
/// `max_events` jumps (reported as censoring).
struct StopRule {
  double horizon = std::numeric_limits<double>::infinity();
  std::int64_t state_cap = 10'000;
  std::uint64_t max_events = 1'000'000;
  bool record_path = true;
};

enum class RunStatus { absorbed, horizon, diverged, event_cap };

const char* to_string(RunStatus status);

struct PathPoint {
  double time = 0.0;
  State state;
};

struct CtmcRun {
  /// Jump chain including the start point; empty unless record_path.
  std::vector<PathPoint> path;
  State final_state;
  /// Time of the last jump, or the horizon when the run hit it.
  double final_time = 0.0;
  std::uint64_t events = 0;
  RunStatus status = RunStatus::absorbed;
};

CtmcRun simulate_ctmc(const GeneratorSpec& spec, State start, const StopRule& stop, RngStream& rng);

/// Absorption statistics over independent replicates. Replicates that hit
/// the state cap are counted as diverged; those that exhaust the event
/// budget as censored. Absorbed, diverged and censored counts add up to
/// the replicate count.
class AbsorptionReport {
 public:
  void record(RunStatus status, State final_state);
  void record(const CtmcRun& run) { record(run.status, run.final_state); }
  void merge(const AbsorptionReport& other);

  std::uint64_t replicates() const noexcept { return replicates_; }
  std::uint64_t diverged() const noexcept { return diverged_; }
  std::uint64_t censored() const noexcept { return censored_; }
  const std::map<State, std::uint64_t>& absorbed() const noexcept { return absorbed_; }

  double frequency(State target) const;
  double standard_error(State target) const;
  double diverged_fraction() const;
  double censored_fraction() const;

 private:
  std::map<State, std::uint64_t> absorbed_;
  std::uint64_t diverged_ = 0;
  std::uint64_t censored_ = 0;
  std::uint64_t replicates_ = 0;
};

/// Standard error sqrt(p(1-p)/n) of an empirical proportion.
double proportion_standard_error(double p, std::uint64_t n);

/// Runs `replicates` independent chains from `start` without a horizon,
/// stream i seeded by (seed, i). Deterministic for any thread count.
AbsorptionReport estimate_absorption(const GeneratorSpec& spec, State start, std::uint64_t replicates,
                                     StopRule caps, std::uint64_t seed, unsigned threads = 1);

}  // namespace lod
