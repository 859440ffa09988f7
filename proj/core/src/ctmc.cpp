#include "lod/ctmc.hpp"

#include <cmath>
#include <stdexcept>

#include "lod/parallel.hpp"

namespace lod {

std::string to_string(State state) {
  return state.is_cemetery() ? std::string("cemetery") : std::to_string(state.value);
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::absorbed: return "absorbed";
    case RunStatus::horizon: return "horizon";
    case RunStatus::diverged: return "diverged";
    case RunStatus::event_cap: return "event_cap";
  }
  return "unknown";
}

void GeneratorSpec::transitions(State state, std::vector<Transition>& out) const {
  out.clear();
  if (state.is_cemetery()) return;
  rates_(state, out);
  std::size_t kept = 0;
  for (const auto& t : out) {
    if (!(t.rate >= 0.0) || !std::isfinite(t.rate)) {
      throw std::invalid_argument("negative or non-finite rate out of state " + to_string(state));
    }
    if (t.rate > 0.0) out[kept++] = t;
  }
  out.resize(kept);
}

std::vector<Transition> GeneratorSpec::transitions(State state) const {
  std::vector<Transition> out;
  transitions(state, out);
  return out;
}

bool GeneratorSpec::is_absorbing(State state) const { return transitions(state).empty(); }

CtmcRun simulate_ctmc(const GeneratorSpec& spec, State start, const StopRule& stop, RngStream& rng) {
  CtmcRun run;
  run.final_state = start;
  if (stop.record_path) run.path.push_back({0.0, start});

  std::vector<Transition> out;
  double time = 0.0;
  State state = start;
  while (true) {
    if (!state.is_cemetery() && state.value >= stop.state_cap) {
      run.status = RunStatus::diverged;
      break;
    }
    spec.transitions(state, out);
    if (out.empty()) {
      run.status = RunStatus::absorbed;
      break;
    }
    if (run.events >= stop.max_events) {
      run.status = RunStatus::event_cap;
      break;
    }
    double total = 0.0;
    for (const auto& t : out) total += t.rate;
    const double next = time + rng.exponential(total);
    if (next > stop.horizon) {
      time = stop.horizon;
      run.status = RunStatus::horizon;
      break;
    }
    time = next;
    // Single uniform against the cumulative rates.
    const double target = rng.uniform() * total;
    double cumulative = 0.0;
    State chosen = out.back().target;
    for (const auto& t : out) {
      cumulative += t.rate;
      if (target < cumulative) {
        chosen = t.target;
        break;
      }
    }
    state = chosen;
    ++run.events;
    if (stop.record_path) run.path.push_back({time, state});
  }
  run.final_state = state;
  run.final_time = time;
  return run;
}

void AbsorptionReport::record(RunStatus status, State final_state) {
  ++replicates_;
  switch (status) {
    case RunStatus::absorbed: ++absorbed_[final_state]; break;
    case RunStatus::diverged: ++diverged_; break;
    case RunStatus::event_cap:
    case RunStatus::horizon: ++censored_; break;
  }
}

void AbsorptionReport::merge(const AbsorptionReport& other) {
  for (const auto& [state, count] : other.absorbed_) absorbed_[state] += count;
  diverged_ += other.diverged_;
  censored_ += other.censored_;
  replicates_ += other.replicates_;
}

double AbsorptionReport::frequency(State target) const {
  if (replicates_ == 0) return 0.0;
  const auto it = absorbed_.find(target);
  const std::uint64_t count = it == absorbed_.end() ? 0 : it->second;
  return static_cast<double>(count) / static_cast<double>(replicates_);
}

double AbsorptionReport::standard_error(State target) const {
  return proportion_standard_error(frequency(target), replicates_);
}

double AbsorptionReport::diverged_fraction() const {
  return replicates_ == 0 ? 0.0 : static_cast<double>(diverged_) / static_cast<double>(replicates_);
}

double AbsorptionReport::censored_fraction() const {
  return replicates_ == 0 ? 0.0 : static_cast<double>(censored_) / static_cast<double>(replicates_);
}

double proportion_standard_error(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

AbsorptionReport estimate_absorption(const GeneratorSpec& spec, State start, std::uint64_t replicates,
                                     StopRule caps, std::uint64_t seed, unsigned threads) {
  if (replicates == 0) throw std::invalid_argument("replicates must be >= 1");
  caps.record_path = false;
  caps.horizon = std::numeric_limits<double>::infinity();
  struct Outcome {
    State state;
    RunStatus status = RunStatus::absorbed;
  };
  const auto outcomes = run_replicates(replicates, threads, [&](std::uint64_t i) {
    RngStream rng(seed, i);
    const CtmcRun run = simulate_ctmc(spec, start, caps, rng);
    return Outcome{run.final_state, run.status};
  });
  AbsorptionReport report;
  for (const auto& o : outcomes) report.record(o.status, o.state);
  return report;
}

}  // namespace lod
