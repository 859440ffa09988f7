#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lod/ctmc.hpp"
#include "lod/killed_asg.hpp"
#include "lod/model.hpp"
#include "lod/rng.hpp"

namespace lod {

/// Per-level event rates of the pruned lookdown ASG. Branching, deleterious
/// and beneficial mutations hit each level at the given rate; every pair of
/// levels coalesces at rate `coalescence` (0 in the deterministic limit).
struct LevelRates {
  double branching = 0.0;
  double coalescence = 0.0;
  double deleterious = 0.0;
  double beneficial = 0.0;
};

LevelRates level_rates(const DetParams& params);
LevelRates level_rates(const DiffusionParams& params);

/// Line-counting process L of the pruned lookdown ASG, out of state n >= 1:
///   n -> n+1     at n * branching
///   n -> n-1     at (n-1) * deleterious + beneficial * 1{n>1} + n(n-1)/2 * coalescence
///   n -> n-l     at beneficial, 2 <= l <= n-1
GeneratorSpec ldasg_generator(const DetParams& params);
GeneratorSpec ldasg_generator(const DiffusionParams& params);

/// Parameter p of the geometric stationary law P(L > n) = p^n in the
/// deterministic limit. p = 1 when L does not have a stationary law.
double geometric_parameter(const DetParams& params);
double geometric_parameter(double s, double u, double nu0, double nu1);

/// True when L has no stationary distribution (deterministic limit with
/// nu0 = 0 and 0 < u <= s, or u = 0 < s).
bool ldasg_diverges(const DetParams& params);

enum class LdasgEventKind { branching, coalescence, deleterious, beneficial };

const char* to_string(LdasgEventKind kind);

/// Occupied levels 1..lines; the immune line sits at level `immune`.
struct LdasgState {
  std::int64_t lines = 1;
  std::int64_t immune = 1;

  friend bool operator==(const LdasgState&, const LdasgState&) = default;
};

struct LdasgEvent {
  LdasgEventKind kind = LdasgEventKind::branching;
  double time = 0.0;
  /// Level hit; for coalescence the lower level of the pair.
  std::int64_t level = 1;
  /// Upper level of a coalescing pair (0 otherwise).
  std::int64_t upper = 0;
  /// False when the event falls on an unoccupied level.
  bool effective = true;
};

/// Applies one event to the level configuration. Events touching an
/// unoccupied level leave the state unchanged.
///  branching at i:      L+1; the immune line moves up if it sits at level >= i
///  coalescence i<j:     line j merges into i; levels above j shift down
///  deleterious at i:    the line is pruned, unless it is immune, in which
///                       case it is relocated to the top level
///  beneficial at i:     all lines above i are pruned; line i becomes immune
LdasgState apply_event(const LdasgState& state, const LdasgEvent& event);

struct LdasgOptions {
  SelectionMode mode = SelectionMode::fecundity;
  /// Events are generated on at least this many levels even if they are
  /// unoccupied (needed to read off the most recent event on a fixed set of
  /// levels). 0 generates events on occupied levels only.
  std::int64_t watched_levels = 0;
  bool record_events = true;
  /// Maintain identities of the lines on each level; the selection mode
  /// decides where the incoming line of a branching event is placed.
  bool track_lines = false;
  std::uint64_t max_events = 50'000'000;
  LdasgState start{};
};

struct LdasgPath {
  std::vector<LdasgEvent> events;
  /// states[k] is the configuration after events[k].
  std::vector<LdasgState> states;
  LdasgState final_state;
  double final_time = 0.0;
  std::uint64_t event_count = 0;
  /// Line identities bottom to top, when tracked. The start line has id 0
  /// and each branching event creates the next id.
  std::vector<std::uint64_t> line_ids;
};

/// Simulates the level dynamics from time 0 (the sampling time) back to r.
LdasgPath simulate_ldasg_levels(const LevelRates& rates, double r, RngStream& rng, const LdasgOptions& options = {});
LdasgPath simulate_ldasg_levels(const DetParams& params, double r, RngStream& rng, const LdasgOptions& options = {});
LdasgPath simulate_ldasg_levels(const DiffusionParams& params, double r, RngStream& rng,
                                const LdasgOptions& options = {});

enum class TailSource { geometric, recursion, empirical };

const char* to_string(TailSource source);

/// a[n] = P(L > n) for n = 0..a.size()-1 under the stationary law.
struct TailProbabilities {
  std::vector<double> a;
  /// Standard errors (empirical source only; zeros otherwise).
  std::vector<double> standard_error;
  TailSource source = TailSource::recursion;
  int truncation = 0;
  double max_residual = 0.0;
  double convergence_change = 0.0;
  std::uint64_t samples = 0;
  /// histogram[k] = number of samples with L = k (empirical source only).
  std::vector<std::uint64_t> histogram;
};

TailProbabilities geometric_tails(double p, int n_max);

/// Solves
///   ((n+1)/2 + sigma + theta) a_n = ((n+1)/2 + theta nu1) a_{n+1} + sigma a_{n-1}
/// with a_0 = 1, a_n -> 0, by truncation at N (a_N = 0) and a tridiagonal
/// solve, doubling N until a_1..a_watch settle and a has decayed below the
/// tolerance at the previous truncation level.
TailProbabilities fearnhead_solve(double sigma, double theta, double nu1, RecursionOptions options = {});

double fearnhead_residual(const std::vector<double>& a, double sigma, double theta, double nu1);

struct EmpiricalTailOptions {
  std::uint64_t samples = 100'000;
  /// Mean spacing between recorded samples; 0 picks 20 / (total rate out of
  /// state 1), or 1 if state 1 is absorbing.
  double spacing = 0.0;
  /// Burn-in before the first sample; 0 picks 50 spacings.
  double burn_in = 0.0;
  std::uint64_t seed = 1;
  int n_max = 40;
  /// Independent chains sharing the samples (each gets its own stream).
  unsigned chains = 1;
  unsigned threads = 1;
};

/// Stationary tails of L estimated from one long run (or a few) of the
/// line-counting chain, sampled at exponential spacings. Throws RegimeError
/// when L has no stationary law.
TailProbabilities stationary_tail_empirical(const DetParams& params, const EmpiricalTailOptions& options);
TailProbabilities stationary_tail_empirical(const DiffusionParams& params, const EmpiricalTailOptions& options);

struct AncestralResult {
  double h = 0.0;
  /// Upper bound on the neglected tail of the series (0 for closed forms).
  double tail_bound = 0.0;
  int terms = 0;
};

/// h(x) = sum_{n>=0} x (1-x)^n a_n: the probability that the ancestor of a
/// sampled individual in the far past is unfit, given unfit proportion x.
/// Deterministic limit: closed form x / (1 - p (1-x)).
AncestralResult ancestral_h(const DetParams& params, double x);
AncestralResult ancestral_h(const DiffusionParams& params, double x, RecursionOptions options = {});
/// Series evaluation against precomputed tails (non-increasing a).
AncestralResult ancestral_h(const std::vector<double>& a, double x);

enum class AncestorRule { fixed, equilibrium, wright_expectation };

AncestorRule parse_ancestor_rule(const std::string& text);
const char* to_string(AncestorRule rule);

struct ScanPoint {
  double u = 0.0;
  double x = 0.0;
  double h = 0.0;
};

/// h over a grid of mutation rates at fixed s.
///   fixed:               x as given
///   equilibrium:         x = deterministic z_inf(s, u, nu0)
///   wright_expectation:  E[h(X_inf)] under Wright's density with
///                        sigma = N s, theta = N u (diffusion limit only)
/// In the diffusion limit sigma = N s and theta = N u for every rule.
std::vector<ScanPoint> ancestral_scan(Limit limit, double s, const std::vector<double>& u_grid, double nu0,
                                      AncestorRule rule, double x = 0.0, double population_size = 0.0);

/// Statistics of the most recent event on the first n levels before time r,
/// with events generated on those levels whether occupied or not.
struct ProofStructureReport {
  std::int64_t n = 1;
  std::uint64_t replicates = 0;
  /// Replicates with no event on the first n levels before r.
  std::uint64_t without_event = 0;
  /// Indexed by LdasgEventKind.
  std::array<double, 4> expected_share{};
  std::array<std::uint64_t, 4> type_count{};
  /// Replicates of each type with L_r > n.
  std::array<std::uint64_t, 4> exceed_count{};
  /// Replicates of each type whose state before the event exceeds the
  /// type's threshold (n-1 for branching, n+1 for coalescence and
  /// deleterious mutation, never for beneficial mutation).
  std::array<std::uint64_t, 4> prior_exceed_count{};
  /// P(L_r > n) and its standard error.
  Estimate tail;
  /// sum over types of expected_share * P(prior state exceeds threshold | type).
  Estimate decomposition;
};

std::vector<ProofStructureReport> proof_structure_check(const DiffusionParams& params,
                                                        const std::vector<std::int64_t>& levels, double r,
                                                        std::uint64_t replicates, std::uint64_t seed,
                                                        unsigned threads = 1,
                                                        SelectionMode mode = SelectionMode::fecundity);

}  // namespace lod
