#include <algorithm>
#include <cmath>
#include <sstream>

#include "commands.hpp"
#include "lod/cli.hpp"
#include "lod/csv.hpp"
#include "lod/deterministic.hpp"
#include "lod/diffusion.hpp"
#include "lod/killed_asg.hpp"
#include "lod/moran.hpp"
#include "lod/parallel.hpp"
#include "lod/pruned_ldasg.hpp"
#include "lod/stats.hpp"

namespace lod::cli {

namespace {

double require(const std::optional<double>& value, const char* name) {
  if (!value) throw ParameterError(name, "is required");
  return *value;
}

std::pair<double, double> mutation_targets(const Options& o) {
  if (o.nu0 && o.nu1) return {*o.nu0, *o.nu1};
  if (o.nu0) return {*o.nu0, 1.0 - *o.nu0};
  if (o.nu1) return {1.0 - *o.nu1, *o.nu1};
  return {0.5, 0.5};
}

std::vector<double> population_list(const Options& o) {
  if (!o.population) return {1e4, 3e4, 1e5};
  std::vector<double> sizes = parse_grid(*o.population);
  for (double size : sizes) {
    if (!(size >= 1.0)) throw ParameterError("N", "must be >= 1");
  }
  return sizes;
}

std::vector<double> time_grid(const Options& o) {
  if (!o.grid.empty()) return parse_grid(o.grid);
  const double t = require(o.t, "t");
  return parse_grid("0:" + format_exact(t) + ":101");
}

}  // namespace

std::int64_t single_population(const Options& o) {
  if (!o.population) throw ParameterError("N", "is required");
  const double n = parse_number(*o.population);
  if (!(n >= 1.0) || n != std::floor(n)) throw ParameterError("N", "must be a positive integer");
  return static_cast<std::int64_t>(n);
}

DetParams Context::det_params() const {
  const auto [nu0, nu1] = mutation_targets(options_);
  return validate(DetParams{require(options_.s, "s"), require(options_.u, "u"), nu0, nu1});
}

DiffusionParams Context::diffusion_params() const {
  const auto [nu0, nu1] = mutation_targets(options_);
  DiffusionParams p{0.0, 0.0, nu0, nu1};
  // sigma and theta may be given directly or as N s and N u.
  if (options_.sigma) {
    p.sigma = *options_.sigma;
  } else if (options_.population && options_.s) {
    p.sigma = static_cast<double>(single_population(options_)) * *options_.s;
  } else {
    throw ParameterError("sigma", "is required (or give N and s)");
  }
  if (options_.theta) {
    p.theta = *options_.theta;
  } else if (options_.population && options_.u) {
    p.theta = static_cast<double>(single_population(options_)) * *options_.u;
  } else {
    throw ParameterError("theta", "is required (or give N and u)");
  }
  return validate(p);
}

MoranParams Context::moran_params() const {
  const auto [nu0, nu1] = mutation_targets(options_);
  MoranParams p;
  p.population_size = single_population(options_);
  p.s = require(options_.s, "s");
  p.u = require(options_.u, "u");
  p.nu0 = nu0;
  p.nu1 = nu1;
  p.selection_mode = parse_selection_mode(options_.mode);
  return validate(p);
}

int cmd_moran(Context& ctx) {
  const Options& o = ctx.options();
  const MoranParams params = ctx.moran_params();
  const double horizon = require(o.t, "t");
  const double x = o.x.value_or(0.5);
  const std::uint64_t reps = ctx.replicates(1);

  auto simulate = [&](std::uint64_t i) {
    RngStream rng(ctx.seed(), i);
    const TypeVector types = iid_types(params.population_size, x, rng);
    const EventStream stream = generate_event_stream(params, horizon, rng);
    return propagate_types(stream, types, params.selection_mode);
  };

  if (reps == 1 && o.grid.empty()) {
    simulate(0).write_csv(ctx.output());
    return kSuccess;
  }
  const std::vector<double> grid = time_grid(o);
  const auto samples =
      run_replicates(reps, o.threads, [&](std::uint64_t i) { return simulate(i).sample(grid); });
  CsvWriter csv(ctx.output(), {"time", "mean_frequency", "standard_error"});
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s[k];
    mean /= static_cast<double>(reps);
    double squares = 0.0;
    for (const auto& s : samples) squares += (s[k] - mean) * (s[k] - mean);
    const double se = reps > 1 ? std::sqrt(squares / static_cast<double>(reps - 1) / static_cast<double>(reps)) : 0.0;
    csv.cell(grid[k]).cell(mean).cell(se).end_row();
  }
  return kSuccess;
}

int cmd_ode(Context& ctx) {
  const Options& o = ctx.options();
  const DetParams params = ctx.det_params();
  const double x = require(o.x, "x");
  const std::vector<double> grid = time_grid(o);
  OdeOptions options;
  if (o.tol) options.absolute_tolerance = options.relative_tolerance = *o.tol;
  const OdeSolution solution = solve_ode(params, x, grid, options);
  CsvWriter csv(ctx.output(), {"time", "z"});
  for (std::size_t k = 0; k < solution.times.size(); ++k) {
    csv.cell(solution.times[k]).cell(solution.values[k]).end_row();
  }
  return kSuccess;
}

int cmd_equilibrium(Context& ctx) {
  const Options& o = ctx.options();
  const auto [nu0, nu1] = mutation_targets(o);
  const double s = require(o.s, "s");
  const std::vector<double> us = o.grid.empty() ? std::vector<double>{require(o.u, "u")} : parse_grid(o.grid);
  std::vector<EquilibriumValue> values;
  for (double u : us) values.push_back(z_infinity(validate(DetParams{s, u, nu0, nu1})));
  CsvWriter csv(ctx.output(), {"u", "z_inf", "regime"});
  for (std::size_t k = 0; k < us.size(); ++k) {
    const char* regime = values[k].regime == EquilibriumRegime::interior ? "interior" : "threshold_zero";
    csv.cell(us[k]).cell(values[k].z_inf).cell(regime).end_row();
  }
  return kSuccess;
}

int cmd_diffusion_moments(Context& ctx) {
  const Options& o = ctx.options();
  const DiffusionParams params = ctx.diffusion_params();
  const int n_max = o.nmax.value_or(20);
  if (n_max < 0) throw ParameterError("nmax", "must be >= 0");
  QuadratureOptions quad;
  if (o.tol) quad.tolerance = *o.tol;
  const WrightMoments moments = wright_moments(params, n_max, quad);
  const SamplingRecursionSolution recursion = sampling_recursion_solve(params.sigma, params.theta, params.nu1);

  double worst = 0.0;
  CsvWriter csv(ctx.output(), {"n", "quadrature", "recursion", "abs_diff"});
  for (int n = 0; n <= n_max; ++n) {
    const double q = moments.moments[static_cast<std::size_t>(n)];
    const double r = static_cast<std::size_t>(n) < recursion.b.size() ? recursion.b[static_cast<std::size_t>(n)] : 0.0;
    worst = std::max(worst, std::abs(q - r));
    csv.cell(static_cast<long long>(n)).cell(q).cell(r).cell(std::abs(q - r)).end_row();
  }
  auto& result = ctx.result();
  result["log_normalizing_constant"] = moments.log_normalizing_constant;
  result["mean"] = moments.mean;
  result["quadrature_nodes"] = moments.nodes;
  result["self_consistency"] = moments.self_consistency;
  result["recursion_truncation"] = recursion.truncation;
  result["recursion_max_residual"] = recursion.max_residual;
  result["max_abs_diff"] = worst;
  return kSuccess;
}

int cmd_killed_asg(Context& ctx) {
  const Options& o = ctx.options();
  const std::int64_t n = o.n.value_or(1);
  McOptions mc;
  mc.replicates = ctx.replicates(100'000);
  mc.seed = ctx.seed();
  mc.threads = o.threads;

  AbsorptionProfile profile;
  double exact = 0.0;
  if (ctx.limit() == Limit::deterministic) {
    const DetParams params = ctx.det_params();
    profile = absorption_profile(params, n, mc);
    exact = std::pow(first_step_w(params.s, params.u, params.nu1), static_cast<double>(n));
  } else {
    const DiffusionParams params = ctx.diffusion_params();
    profile = absorption_profile(params, n, mc);
    const SamplingRecursionSolution b = sampling_recursion_solve(params.sigma, params.theta, params.nu1);
    exact = static_cast<std::size_t>(n) < b.b.size() ? b.b[static_cast<std::size_t>(n)] : 0.0;
  }

  CsvWriter csv(ctx.output(), {"n", "to_zero", "se_to_zero", "to_cemetery", "se_to_cemetery", "diverged",
                               "se_diverged", "censored", "exact_to_zero"});
  csv.cell(static_cast<long long>(n))
      .cell(profile.to_zero.value)
      .cell(profile.to_zero.standard_error)
      .cell(profile.to_cemetery.value)
      .cell(profile.to_cemetery.standard_error)
      .cell(profile.diverged.value)
      .cell(profile.diverged.standard_error)
      .cell(profile.censored_fraction)
      .cell(exact)
      .end_row();
  return kSuccess;
}

int cmd_duality(Context& ctx) {
  const Options& o = ctx.options();
  const double x = require(o.x, "x");
  const double t = require(o.t, "t");
  const std::int64_t n = o.n.value_or(1);
  McOptions mc;
  mc.replicates = ctx.replicates(100'000);
  mc.seed = ctx.seed();
  mc.threads = o.threads;

  nlohmann::json report;
  DualityReport r;
  if (ctx.limit() == Limit::deterministic) {
    const DetParams p = ctx.det_params();
    r = duality_check(p, x, t, n, mc);
    report["limit"] = "deterministic";
    report["params"] = {{"s", p.s}, {"u", p.u}, {"nu0", p.nu0}, {"nu1", p.nu1}};
  } else {
    const DiffusionParams p = ctx.diffusion_params();
    r = duality_check(p, x, t, n, mc, o.dt.value_or(0.0));
    report["limit"] = "diffusion";
    report["params"] = {{"sigma", p.sigma}, {"theta", p.theta}, {"nu0", p.nu0}, {"nu1", p.nu1}};
  }
  report["x"] = x;
  report["t"] = t;
  report["n"] = n;
  report["lhs"] = r.lhs;
  report["rhs"] = r.rhs;
  report["se_lhs"] = r.se_lhs;
  report["se_rhs"] = r.se_rhs;
  report["z_score"] = r.z_score;
  report["pass"] = r.pass;
  report["replicates"] = r.replicates;
  report["censored"] = r.censored;
  ctx.output() << report.dump(2) << '\n';
  ctx.result() = report;
  return r.pass ? kSuccess : kStatisticalFailure;
}

namespace {

int ldasg_path(Context& ctx) {
  const Options& o = ctx.options();
  const double r = require(o.t, "t");
  LdasgOptions options;
  options.mode = parse_selection_mode(o.mode);
  RngStream rng(ctx.seed(), 0);
  ctx.replicates(1);
  const LevelRates rates =
      ctx.limit() == Limit::deterministic ? level_rates(ctx.det_params()) : level_rates(ctx.diffusion_params());
  const LdasgPath path = simulate_ldasg_levels(rates, r, rng, options);
  CsvWriter csv(ctx.output(), {"time", "kind", "level", "upper", "lines", "immune"});
  csv.cell(0.0).cell("start").cell(0LL).cell(0LL).cell(static_cast<long long>(options.start.lines))
      .cell(static_cast<long long>(options.start.immune)).end_row();
  for (std::size_t k = 0; k < path.events.size(); ++k) {
    const LdasgEvent& e = path.events[k];
    csv.cell(e.time)
        .cell(to_string(e.kind))
        .cell(static_cast<long long>(e.level))
        .cell(static_cast<long long>(e.upper))
        .cell(static_cast<long long>(path.states[k].lines))
        .cell(static_cast<long long>(path.states[k].immune))
        .end_row();
  }
  ctx.result()["events"] = path.event_count;
  return kSuccess;
}

}  // namespace

int cmd_ldasg(Context& ctx) {
  const Options& o = ctx.options();
  if (o.t) return ldasg_path(ctx);

  EmpiricalTailOptions options;
  options.samples = ctx.replicates(100'000);
  options.seed = ctx.seed();
  options.n_max = o.nmax.value_or(20);
  options.threads = o.threads;

  TailProbabilities empirical;
  TailProbabilities exact;
  if (ctx.limit() == Limit::deterministic) {
    const DetParams p = ctx.det_params();
    empirical = stationary_tail_empirical(p, options);
    exact = geometric_tails(geometric_parameter(p), static_cast<int>(empirical.histogram.size()) + options.n_max);
    ctx.result()["p"] = geometric_parameter(p);
  } else {
    const DiffusionParams p = ctx.diffusion_params();
    empirical = stationary_tail_empirical(p, options);
    exact = fearnhead_solve(p.sigma, p.theta, p.nu1);
  }
  auto exact_tail = [&](std::size_t n) { return n < exact.a.size() ? exact.a[n] : 0.0; };

  CsvWriter csv(ctx.output(), {"n", "empirical", "standard_error", "exact"});
  for (std::size_t n = 0; n < empirical.a.size(); ++n) {
    csv.cell(static_cast<long long>(n)).cell(empirical.a[n]).cell(empirical.standard_error[n]).cell(exact_tail(n)).end_row();
  }

  // Cells L = 1, 2, ..., largest observed value.
  std::vector<std::uint64_t> observed(empirical.histogram.begin() + 1, empirical.histogram.end());
  std::vector<double> expected;
  for (std::size_t k = 1; k <= observed.size(); ++k) expected.push_back(exact_tail(k - 1) - exact_tail(k));
  const ChiSquareResult gof = chi_square_test(observed, expected);
  auto& result = ctx.result();
  result["chi_square"] = gof.statistic;
  result["degrees_of_freedom"] = gof.degrees_of_freedom;
  result["p_value"] = gof.p_value;
  result["pass"] = gof.p_value > 1e-3;
  return gof.p_value > 1e-3 ? kSuccess : kStatisticalFailure;
}

int cmd_fearnhead(Context& ctx) {
  const Options& o = ctx.options();
  const auto [nu0, nu1] = mutation_targets(o);
  RecursionOptions options;
  options.initial_truncation = o.nmax.value_or(64);
  if (o.tol) options.tolerance = *o.tol;
  const TailProbabilities tails = fearnhead_solve(require(o.sigma, "sigma"), require(o.theta, "theta"), nu1, options);
  const auto rows = std::min<std::size_t>(tails.a.size(), static_cast<std::size_t>(options.initial_truncation) + 1);
  CsvWriter csv(ctx.output(), {"n", "a"});
  for (std::size_t n = 0; n < rows; ++n) csv.cell(static_cast<long long>(n)).cell(tails.a[n]).end_row();
  auto& result = ctx.result();
  result["truncation"] = tails.truncation;
  result["max_residual"] = tails.max_residual;
  result["convergence_change"] = tails.convergence_change;
  (void)nu0;
  return kSuccess;
}

int cmd_ancestral(Context& ctx) {
  const Options& o = ctx.options();
  const std::vector<double> xs = o.grid.empty() ? std::vector<double>{require(o.x, "x")} : parse_grid(o.grid);
  CsvWriter csv(ctx.output(), {"x", "h", "tail_bound"});
  if (ctx.limit() == Limit::deterministic) {
    const DetParams p = ctx.det_params();
    for (double x : xs) {
      const AncestralResult r = ancestral_h(p, x);
      csv.cell(x).cell(r.h).cell(r.tail_bound).end_row();
    }
  } else {
    const DiffusionParams p = ctx.diffusion_params();
    RecursionOptions options;
    if (o.tol) options.tolerance = *o.tol;
    const TailProbabilities tails = fearnhead_solve(p.sigma, p.theta, p.nu1, options);
    for (double x : xs) {
      const AncestralResult r = ancestral_h(tails.a, x);
      csv.cell(x).cell(r.h).cell(r.tail_bound).end_row();
    }
  }
  return kSuccess;
}

int cmd_phase_diagram(Context& ctx) {
  const Options& o = ctx.options();
  const std::string& figure = o.figure;
  if (figure != "fig2-left" && figure != "fig2-right" && figure != "fig8-left" && figure != "fig8-right") {
    throw ParameterError("figure", "expected fig2-left, fig2-right, fig8-left or fig8-right");
  }
  const double s = require(o.s, "s");
  const auto [nu0, nu1] = mutation_targets(o);
  if (o.grid.empty()) throw ParameterError("grid", "is required");
  const std::vector<double> us = parse_grid(o.grid);
  const bool ancestral = figure.starts_with("fig8");
  const bool diffusion = figure.ends_with("right");
  const std::vector<double> sizes = diffusion ? population_list(o) : std::vector<double>{};
  (void)nu1;

  CsvWriter csv(ctx.output(), {"u", "curve", "value"});
  for (double u : us) {
    const DetParams det = validate(DetParams{s, u, nu0, 1.0 - nu0});
    const double z = z_infinity(det).z_inf;
    const double det_value = ancestral ? ancestral_h(det, z).h : z;
    csv.cell(u).cell("deterministic").cell(det_value).end_row();
    for (double size : sizes) {
      const DiffusionParams diff = validate(DiffusionParams{size * s, size * u, nu0, 1.0 - nu0});
      double value = 0.0;
      if (ancestral) {
        value = ancestral_scan(Limit::diffusion, s, {u}, nu0, AncestorRule::wright_expectation, 0.0, size)[0].h;
      } else {
        value = wright_moments(diff, 1).mean;
      }
      csv.cell(u).cell("N=" + format_number(size)).cell(value).end_row();
    }
  }
  return kSuccess;
}

}  // namespace lod::cli
