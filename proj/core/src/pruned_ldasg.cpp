#include "lod/pruned_ldasg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lod/deterministic.hpp"
#include "lod/diffusion.hpp"
#include "lod/parallel.hpp"
#include "lod/tridiagonal.hpp"

namespace lod {

LevelRates level_rates(const DetParams& raw) {
  const DetParams p = validate(raw);
  return {p.s, 0.0, p.u * p.nu1, p.u * p.nu0};
}

LevelRates level_rates(const DiffusionParams& raw) {
  const DiffusionParams p = validate(raw);
  return {p.sigma, 1.0, p.theta * p.nu1, p.theta * p.nu0};
}

namespace {

GeneratorSpec make_ldasg_generator(const LevelRates& r) {
  return GeneratorSpec([r](State state, std::vector<Transition>& out) {
    const std::int64_t n = state.value;
    if (n < 1) return;
    const auto lines = static_cast<double>(n);
    out.push_back({State{n + 1}, lines * r.branching});
    if (n > 1) {
      const double down = (lines - 1.0) * r.deleterious + r.beneficial + 0.5 * lines * (lines - 1.0) * r.coalescence;
      out.push_back({State{n - 1}, down});
      for (std::int64_t drop = 2; drop < n; ++drop) out.push_back({State{n - drop}, r.beneficial});
    }
  });
}

double total_rate_out_of_one(const LevelRates& r) { return r.branching; }

}  // namespace

GeneratorSpec ldasg_generator(const DetParams& params) { return make_ldasg_generator(level_rates(params)); }
GeneratorSpec ldasg_generator(const DiffusionParams& params) { return make_ldasg_generator(level_rates(params)); }

double geometric_parameter(double s, double u, double nu0, double nu1) {
  const DetParams p = validate(DetParams{s, u, nu0, nu1});
  if (p.s == 0.0) return 0.0;
  if (ldasg_diverges(p)) return 1.0;
  // Smaller root of (u nu1) p^2 - (u+s) p + s, written without cancellation;
  // (u+s)^2 - 4 s u nu1 = (u-s)^2 + 4 s u nu0. Covers nu1 = 0 (p = s/(u+s)).
  const double disc = (p.u - p.s) * (p.u - p.s) + 4.0 * p.s * p.u * p.nu0;
  return std::min(1.0, 2.0 * p.s / (p.u + p.s + std::sqrt(disc)));
}

double geometric_parameter(const DetParams& params) {
  return geometric_parameter(params.s, params.u, params.nu0, params.nu1);
}

bool ldasg_diverges(const DetParams& raw) {
  const DetParams p = validate(raw);
  return p.s > 0.0 && (p.u == 0.0 || (p.nu0 == 0.0 && p.u <= p.s));
}

const char* to_string(LdasgEventKind kind) {
  switch (kind) {
    case LdasgEventKind::branching: return "branching";
    case LdasgEventKind::coalescence: return "coalescence";
    case LdasgEventKind::deleterious: return "deleterious";
    case LdasgEventKind::beneficial: return "beneficial";
  }
  return "unknown";
}

LdasgState apply_event(const LdasgState& state, const LdasgEvent& event) {
  LdasgState next = state;
  const std::int64_t i = event.level;
  switch (event.kind) {
    case LdasgEventKind::branching:
      if (i < 1 || i > state.lines) return state;
      next.lines += 1;
      if (state.immune >= i) next.immune += 1;
      break;
    case LdasgEventKind::coalescence: {
      const std::int64_t j = event.upper;
      if (i < 1 || j <= i || j > state.lines) return state;
      next.lines -= 1;
      if (state.immune == j) {
        next.immune = i;
      } else if (state.immune > j) {
        next.immune -= 1;
      }
      break;
    }
    case LdasgEventKind::deleterious:
      if (i < 1 || i > state.lines) return state;
      if (i == state.immune) {
        next.immune = state.lines;
      } else {
        next.lines -= 1;
        if (state.immune > i) next.immune -= 1;
      }
      break;
    case LdasgEventKind::beneficial:
      if (i < 1 || i > state.lines) return state;
      next.lines = i;
      next.immune = i;
      break;
  }
  return next;
}

namespace {

void update_line_ids(std::vector<std::uint64_t>& ids, std::uint64_t& next_id, const LdasgState& before,
                     const LdasgEvent& event, SelectionMode mode) {
  const auto i = static_cast<std::size_t>(event.level);
  switch (event.kind) {
    case LdasgEventKind::branching: {
      // Fecundity: the incoming branch takes level i, the continuing one moves
      // to i+1. Viability: the continuing branch stays, the incoming one sits
      // at i+1.
      const std::size_t at = mode == SelectionMode::fecundity ? i - 1 : i;
      ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(at), next_id++);
      break;
    }
    case LdasgEventKind::coalescence:
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(event.upper - 1));
      break;
    case LdasgEventKind::deleterious: {
      const auto it = ids.begin() + static_cast<std::ptrdiff_t>(i - 1);
      if (event.level == before.immune) {
        std::rotate(it, it + 1, ids.end());
      } else {
        ids.erase(it);
      }
      break;
    }
    case LdasgEventKind::beneficial:
      ids.resize(i);
      break;
  }
}

/// Runs the level dynamics to time r, calling observe(event, before, after)
/// for every generated event (effective or not). Returns the final state and
/// fills the event count and final time.
template <typename Observer>
LdasgState run_levels(const LevelRates& rates, double r, RngStream& rng, const LdasgOptions& options,
                      std::vector<std::uint64_t>* ids, std::uint64_t& event_count, double& final_time,
                      Observer&& observe) {
  if (!(r >= 0.0)) throw ParameterError("r", "must be >= 0");
  LdasgState state = options.start;
  if (state.lines < 1 || state.immune < 1 || state.immune > state.lines) {
    throw ParameterError("start", "requires 1 <= immune <= lines");
  }
  std::uint64_t next_id = 0;
  if (ids != nullptr) {
    ids->clear();
    for (std::int64_t k = 0; k < state.lines; ++k) ids->push_back(next_id++);
  }

  double t = 0.0;
  event_count = 0;
  final_time = r;
  while (event_count < options.max_events) {
    const std::int64_t levels = std::max(state.lines, options.watched_levels);
    const auto k = static_cast<double>(levels);
    const double branching = k * rates.branching;
    const double coalescence = 0.5 * k * (k - 1.0) * rates.coalescence;
    const double deleterious = k * rates.deleterious;
    const double beneficial = k * rates.beneficial;
    const double total = branching + coalescence + deleterious + beneficial;
    if (!(total > 0.0)) break;
    t += rng.exponential(total);
    if (t > r) break;

    LdasgEvent event;
    event.time = t;
    double pick = rng.uniform() * total;
    if (pick < branching) {
      event.kind = LdasgEventKind::branching;
    } else if ((pick -= branching) < coalescence) {
      event.kind = LdasgEventKind::coalescence;
    } else if ((pick -= coalescence) < deleterious) {
      event.kind = LdasgEventKind::deleterious;
    } else {
      event.kind = LdasgEventKind::beneficial;
    }
    const auto n = static_cast<std::uint64_t>(levels);
    if (event.kind == LdasgEventKind::coalescence) {
      auto a = rng.below(n);
      auto b = rng.below(n - 1);
      if (b >= a) ++b;
      if (a > b) std::swap(a, b);
      event.level = static_cast<std::int64_t>(a) + 1;
      event.upper = static_cast<std::int64_t>(b) + 1;
      event.effective = event.upper <= state.lines;
    } else {
      event.level = static_cast<std::int64_t>(rng.below(n)) + 1;
      event.effective = event.level <= state.lines;
    }

    const LdasgState before = state;
    if (event.effective) {
      state = apply_event(state, event);
      if (ids != nullptr) update_line_ids(*ids, next_id, before, event, options.mode);
    }
    ++event_count;
    observe(event, before, state);
  }
  if (event_count >= options.max_events) final_time = t;
  return state;
}

}  // namespace

LdasgPath simulate_ldasg_levels(const LevelRates& rates, double r, RngStream& rng, const LdasgOptions& options) {
  LdasgPath path;
  std::vector<std::uint64_t>* ids = options.track_lines ? &path.line_ids : nullptr;
  path.final_state = run_levels(rates, r, rng, options, ids, path.event_count, path.final_time,
                                [&](const LdasgEvent& event, const LdasgState&, const LdasgState& after) {
                                  if (!options.record_events) return;
                                  path.events.push_back(event);
                                  path.states.push_back(after);
                                });
  return path;
}

LdasgPath simulate_ldasg_levels(const DetParams& params, double r, RngStream& rng, const LdasgOptions& options) {
  return simulate_ldasg_levels(level_rates(params), r, rng, options);
}

LdasgPath simulate_ldasg_levels(const DiffusionParams& params, double r, RngStream& rng,
                                const LdasgOptions& options) {
  return simulate_ldasg_levels(level_rates(params), r, rng, options);
}

const char* to_string(TailSource source) {
  switch (source) {
    case TailSource::geometric: return "closed-form-geometric";
    case TailSource::recursion: return "recursion";
    case TailSource::empirical: return "empirical";
  }
  return "unknown";
}

TailProbabilities geometric_tails(double p, int n_max) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p", "must lie in [0,1]");
  if (n_max < 0) throw ParameterError("nmax", "must be >= 0");
  TailProbabilities tails;
  tails.source = TailSource::geometric;
  tails.a.resize(static_cast<std::size_t>(n_max) + 1);
  tails.standard_error.assign(tails.a.size(), 0.0);
  double value = 1.0;
  for (auto& a : tails.a) {
    a = value;
    value *= p;
  }
  return tails;
}

namespace {

std::vector<double> solve_truncated_fearnhead(double sigma, double theta, double nu1, int truncation) {
  const auto size = static_cast<std::size_t>(truncation - 1);
  std::vector<double> lower(size, -sigma), diag(size), upper(size), rhs(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    const double n = static_cast<double>(k + 1);
    diag[k] = 0.5 * (n + 1.0) + sigma + theta;
    upper[k] = -(0.5 * (n + 1.0) + theta * nu1);
  }
  rhs[0] = sigma;
  std::vector<double> a = solve_tridiagonal(lower, diag, upper, rhs);
  a.insert(a.begin(), 1.0);
  a.push_back(0.0);
  return a;
}

}  // namespace

double fearnhead_residual(const std::vector<double>& a, double sigma, double theta, double nu1) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < a.size(); ++k) {
    const double n = static_cast<double>(k);
    const double lhs = (0.5 * (n + 1.0) + sigma + theta) * a[k];
    const double rhs = (0.5 * (n + 1.0) + theta * nu1) * a[k + 1] + sigma * a[k - 1];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

TailProbabilities fearnhead_solve(double sigma, double theta, double nu1, RecursionOptions options) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma", "must be >= 0");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw ParameterError("theta", "must be >= 0");
  if (!(nu1 >= 0.0 && nu1 <= 1.0)) throw ParameterError("nu1", "must lie in [0,1]");
  if (options.initial_truncation < 2) throw ParameterError("nmax", "must be >= 2");

  int truncation = options.initial_truncation;
  std::vector<double> coarse = solve_truncated_fearnhead(sigma, theta, nu1, truncation);
  while (2 * truncation <= options.max_truncation) {
    const int finer = 2 * truncation;
    std::vector<double> fine = solve_truncated_fearnhead(sigma, theta, nu1, finer);
    double change = 0.0;
    const std::size_t watched = std::min(coarse.size(), static_cast<std::size_t>(options.watch) + 1);
    for (std::size_t k = 0; k < watched; ++k) change = std::max(change, std::abs(coarse[k] - fine[k]));
    // The tails must also have died out at the old boundary, so the whole
    // vector can feed the ancestral series.
    const double boundary = fine[static_cast<std::size_t>(truncation)];
    truncation = finer;
    if (change < options.tolerance && boundary < options.tolerance) {
      TailProbabilities tails;
      tails.source = TailSource::recursion;
      tails.a = std::move(fine);
      tails.standard_error.assign(tails.a.size(), 0.0);
      tails.truncation = truncation;
      tails.convergence_change = change;
      tails.max_residual = fearnhead_residual(tails.a, sigma, theta, nu1);
      return tails;
    }
    coarse = std::move(fine);
  }
  throw ConvergenceError("Fearnhead recursion did not settle below truncation " +
                         std::to_string(options.max_truncation));
}

namespace {

TailProbabilities empirical_tails(const LevelRates& rates, const EmpiricalTailOptions& options) {
  if (options.samples == 0) throw ParameterError("reps", "must be >= 1");
  if (options.n_max < 0) throw ParameterError("nmax", "must be >= 0");
  const double out_of_one = total_rate_out_of_one(rates);
  const double spacing = options.spacing > 0.0 ? options.spacing : (out_of_one > 0.0 ? 20.0 / out_of_one : 1.0);
  const double burn_in = options.burn_in > 0.0 ? options.burn_in : 50.0 * spacing;
  const GeneratorSpec spec = make_ldasg_generator(rates);
  const unsigned chains = std::max(1u, options.chains);

  StopRule stop;
  stop.record_path = false;
  stop.state_cap = std::numeric_limits<std::int64_t>::max();
  stop.max_events = std::numeric_limits<std::uint64_t>::max();

  auto per_chain = run_replicates(chains, options.threads, [&](std::uint64_t c) {
    const std::uint64_t share = options.samples / chains + (c < options.samples % chains ? 1 : 0);
    RngStream rng(options.seed, c);
    std::vector<std::int64_t> draws;
    draws.reserve(share);
    State state{1};
    StopRule step = stop;
    step.horizon = burn_in;
    state = simulate_ctmc(spec, state, step, rng).final_state;
    for (std::uint64_t k = 0; k < share; ++k) {
      step.horizon = rng.exponential(1.0 / spacing);
      state = simulate_ctmc(spec, state, step, rng).final_state;
      draws.push_back(state.value);
    }
    return draws;
  });

  TailProbabilities tails;
  tails.source = TailSource::empirical;
  tails.samples = options.samples;
  std::int64_t largest = 1;
  for (const auto& draws : per_chain) {
    for (auto v : draws) largest = std::max(largest, v);
  }
  tails.histogram.assign(static_cast<std::size_t>(largest) + 1, 0);
  for (const auto& draws : per_chain) {
    for (auto v : draws) ++tails.histogram[static_cast<std::size_t>(v)];
  }
  const auto total = static_cast<double>(options.samples);
  tails.a.assign(static_cast<std::size_t>(options.n_max) + 1, 0.0);
  tails.standard_error.assign(tails.a.size(), 0.0);
  // a[n] = #{L > n} / samples, accumulated from the top.
  std::uint64_t above = 0;
  for (std::int64_t v = largest; v >= 0; --v) {
    if (v <= options.n_max) {
      const double a = static_cast<double>(above) / total;
      tails.a[static_cast<std::size_t>(v)] = a;
      tails.standard_error[static_cast<std::size_t>(v)] = proportion_standard_error(a, options.samples);
    }
    above += tails.histogram[static_cast<std::size_t>(v)];
  }
  return tails;
}

}  // namespace

TailProbabilities stationary_tail_empirical(const DetParams& params, const EmpiricalTailOptions& options) {
  if (ldasg_diverges(params)) throw RegimeError("line-counting process diverges: no stationary law");
  return empirical_tails(level_rates(params), options);
}

TailProbabilities stationary_tail_empirical(const DiffusionParams& params, const EmpiricalTailOptions& options) {
  return empirical_tails(level_rates(params), options);
}

AncestralResult ancestral_h(const std::vector<double>& a, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("x", "must lie in [0,1]");
  if (a.empty()) throw ParameterError("a", "needs at least a_0");
  // Sum the first half; a is non-increasing, so the remainder is at most
  // a_K (1-x)^K.
  const std::size_t half = a.size() > 2 ? (a.size() - 1) / 2 : a.size();
  AncestralResult result;
  double weight = 1.0;
  for (std::size_t n = 0; n < half; ++n) {
    result.h += x * weight * a[n];
    weight *= 1.0 - x;
  }
  result.terms = static_cast<int>(half);
  result.tail_bound = half < a.size() ? a[half] * weight : 0.0;
  result.h = std::clamp(result.h, x, 1.0);
  return result;
}

AncestralResult ancestral_h(const DetParams& raw, double x) {
  const DetParams params = validate(raw);
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("x", "must lie in [0,1]");
  const double p = geometric_parameter(params);
  AncestralResult result;
  if (p >= 1.0) {
    result.h = x > 0.0 ? 1.0 : 0.0;
  } else {
    result.h = x / (1.0 - p * (1.0 - x));
  }
  return result;
}

AncestralResult ancestral_h(const DiffusionParams& raw, double x, RecursionOptions options) {
  const DiffusionParams params = validate(raw);
  const TailProbabilities tails = fearnhead_solve(params.sigma, params.theta, params.nu1, options);
  return ancestral_h(tails.a, x);
}

AncestorRule parse_ancestor_rule(const std::string& text) {
  if (text == "fixed") return AncestorRule::fixed;
  if (text == "equilibrium" || text == "zinf") return AncestorRule::equilibrium;
  if (text == "wright" || text == "wright-expectation") return AncestorRule::wright_expectation;
  throw ParameterError("x_rule", "expected fixed, equilibrium or wright");
}

const char* to_string(AncestorRule rule) {
  switch (rule) {
    case AncestorRule::fixed: return "fixed";
    case AncestorRule::equilibrium: return "equilibrium";
    case AncestorRule::wright_expectation: return "wright";
  }
  return "unknown";
}

std::vector<ScanPoint> ancestral_scan(Limit limit, double s, const std::vector<double>& u_grid, double nu0,
                                      AncestorRule rule, double x, double population_size) {
  if (u_grid.empty()) throw ParameterError("grid", "must be nonempty");
  if (rule == AncestorRule::fixed && !(x >= 0.0 && x <= 1.0)) throw ParameterError("x", "must lie in [0,1]");
  if (limit == Limit::deterministic && rule == AncestorRule::wright_expectation) {
    throw ParameterError("x_rule", "the Wright expectation needs the diffusion limit");
  }
  if (limit == Limit::diffusion && !(population_size > 0.0)) throw ParameterError("N", "must be > 0");

  std::vector<ScanPoint> points;
  points.reserve(u_grid.size());
  for (double u : u_grid) {
    const DetParams det = validate(DetParams{s, u, nu0, 1.0 - nu0});
    ScanPoint point;
    point.u = u;
    point.x = rule == AncestorRule::equilibrium ? z_infinity(det).z_inf : x;
    if (limit == Limit::deterministic) {
      point.h = ancestral_h(det, point.x).h;
    } else {
      const DiffusionParams diff{population_size * s, population_size * u, det.nu0, det.nu1};
      const TailProbabilities tails = fearnhead_solve(diff.sigma, diff.theta, diff.nu1);
      if (rule == AncestorRule::wright_expectation) {
        point.x = wright_expectation(diff, [](double y) { return y; });
        point.h = wright_expectation(diff, [&](double y) { return ancestral_h(tails.a, y).h; });
      } else {
        point.h = ancestral_h(tails.a, point.x).h;
      }
    }
    points.push_back(point);
  }
  return points;
}

namespace {

struct LastEvent {
  int kind = -1;
  std::int64_t before = 0;
};

struct ProofSample {
  std::vector<LastEvent> last;
  std::int64_t final_lines = 1;
};

}  // namespace

std::vector<ProofStructureReport> proof_structure_check(const DiffusionParams& raw,
                                                        const std::vector<std::int64_t>& levels, double r,
                                                        std::uint64_t replicates, std::uint64_t seed,
                                                        unsigned threads, SelectionMode mode) {
  const DiffusionParams params = validate(raw);
  if (levels.empty()) throw ParameterError("n", "needs at least one level");
  for (auto n : levels) {
    if (n < 1) throw ParameterError("n", "levels must be >= 1");
  }
  if (!(r > 0.0)) throw ParameterError("r", "must be > 0");
  const LevelRates rates = level_rates(params);
  LdasgOptions options;
  options.mode = mode;
  options.record_events = false;
  options.watched_levels = *std::max_element(levels.begin(), levels.end()) + 1;

  const auto samples = run_replicates(replicates, threads, [&](std::uint64_t i) {
    RngStream rng(seed, i);
    ProofSample sample;
    sample.last.resize(levels.size());
    std::uint64_t events = 0;
    double final_time = 0.0;
    const LdasgState end = run_levels(
        rates, r, rng, options, nullptr, events, final_time,
        [&](const LdasgEvent& event, const LdasgState& before, const LdasgState&) {
          for (std::size_t k = 0; k < levels.size(); ++k) {
            const std::int64_t n = levels[k];
            const bool on_first_levels =
                event.kind == LdasgEventKind::coalescence ? event.upper <= n + 1 : event.level <= n;
            if (on_first_levels) sample.last[k] = {static_cast<int>(event.kind), before.lines};
          }
        });
    sample.final_lines = end.lines;
    return sample;
  });

  std::vector<ProofStructureReport> reports;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    ProofStructureReport report;
    report.n = levels[k];
    report.replicates = replicates;
    const auto n = static_cast<double>(report.n);
    const double per_level[4] = {params.sigma, 0.5 * (n + 1.0), params.theta * params.nu1,
                                 params.theta * params.nu0};
    const double total = per_level[0] + per_level[1] + per_level[2] + per_level[3];
    for (int t = 0; t < 4; ++t) report.expected_share[static_cast<std::size_t>(t)] = per_level[t] / total;
    const std::int64_t threshold[4] = {report.n - 1, report.n + 1, report.n + 1,
                                       std::numeric_limits<std::int64_t>::max()};

    std::uint64_t exceed = 0;
    for (const auto& sample : samples) {
      const bool above = sample.final_lines > report.n;
      exceed += above ? 1 : 0;
      const LastEvent& last = sample.last[k];
      if (last.kind < 0) {
        ++report.without_event;
        continue;
      }
      const auto t = static_cast<std::size_t>(last.kind);
      ++report.type_count[t];
      if (above) ++report.exceed_count[t];
      if (last.before > threshold[t]) ++report.prior_exceed_count[t];
    }
    const double tail = static_cast<double>(exceed) / static_cast<double>(replicates);
    report.tail = {tail, proportion_standard_error(tail, replicates)};
    double variance = 0.0;
    for (std::size_t t = 0; t < 4; ++t) {
      if (report.type_count[t] == 0) continue;
      const double q =
          static_cast<double>(report.prior_exceed_count[t]) / static_cast<double>(report.type_count[t]);
      report.decomposition.value += report.expected_share[t] * q;
      variance += report.expected_share[t] * report.expected_share[t] * q * (1.0 - q) /
                  static_cast<double>(report.type_count[t]);
    }
    report.decomposition.standard_error = std::sqrt(variance);
    reports.push_back(report);
  }
  return reports;
}

}  // namespace lod
