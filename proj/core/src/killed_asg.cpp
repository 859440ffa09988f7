#include "lod/killed_asg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lod/deterministic.hpp"
#include "lod/diffusion.hpp"
#include "lod/parallel.hpp"
#include "lod/tridiagonal.hpp"

namespace lod {

KilledRates killed_asg_rates(const DetParams& p, std::int64_t n) {
  const auto lines = static_cast<double>(n);
  return {lines * p.s, lines * p.u * p.nu1, lines * p.u * p.nu0};
}

KilledRates killed_asg_rates(const DiffusionParams& p, std::int64_t n) {
  const auto lines = static_cast<double>(n);
  return {lines * p.sigma, 0.5 * lines * (lines - 1.0) + lines * p.theta * p.nu1, lines * p.theta * p.nu0};
}

namespace {

template <typename Params>
GeneratorSpec make_killed_generator(const Params& raw) {
  const Params params = validate(raw);
  return GeneratorSpec([params](State state, std::vector<Transition>& out) {
    if (state.value <= 0) return;
    const KilledRates r = killed_asg_rates(params, state.value);
    out.push_back({State{state.value + 1}, r.up});
    out.push_back({State{state.value - 1}, r.down});
    out.push_back({State::cemetery(), r.kill});
  });
}

template <typename Params>
AbsorptionProfile make_profile(const Params& params, std::int64_t n, const McOptions& options) {
  if (n < 1) throw ParameterError("n", "must be >= 1");
  const AbsorptionReport report = estimate_absorption(make_killed_generator(params), State{n}, options.replicates,
                                                      options.caps, options.seed, options.threads);
  AbsorptionProfile profile;
  profile.replicates = report.replicates();
  profile.to_zero = {report.frequency(State{0}), report.standard_error(State{0})};
  profile.to_cemetery = {report.frequency(State::cemetery()), report.standard_error(State::cemetery())};
  profile.diverged = {report.diverged_fraction(),
                      proportion_standard_error(report.diverged_fraction(), report.replicates())};
  profile.censored_fraction = report.censored_fraction();
  return profile;
}

struct MomentSample {
  double value = 0.0;
  bool censored = false;
};

template <typename Params>
std::vector<MomentSample> killed_moment_samples(const Params& params, double x, double t, std::int64_t n,
                                                const McOptions& options, std::uint64_t stream_offset,
                                                std::uint64_t stream_stride) {
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("x", "must lie in [0,1]");
  if (!(t >= 0.0)) throw ParameterError("t", "must be >= 0");
  if (n < 0) throw ParameterError("n", "must be >= 0");
  const GeneratorSpec spec = make_killed_generator(params);
  StopRule stop = options.caps;
  stop.horizon = t;
  stop.record_path = false;
  return run_replicates(options.replicates, options.threads, [&](std::uint64_t i) {
    RngStream rng(options.seed, stream_offset + stream_stride * i);
    const CtmcRun run = simulate_ctmc(spec, State{n}, stop, rng);
    MomentSample sample;
    sample.censored = run.status == RunStatus::event_cap;
    if (!run.final_state.is_cemetery()) {
      sample.value = std::pow(1.0 - x, static_cast<double>(run.final_state.value));
    }
    return sample;
  });
}

Estimate mean_and_error(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto count = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= count;
  double squares = 0.0;
  for (double v : values) squares += (v - mean) * (v - mean);
  const double variance = values.size() > 1 ? squares / (count - 1.0) : 0.0;
  return {mean, std::sqrt(variance / count)};
}

void finish_report(DualityReport& report) {
  const double combined = std::hypot(report.se_lhs, report.se_rhs);
  const double gap = std::abs(report.lhs - report.rhs);
  // Averages of identical values carry rounding noise; gaps below 1e-12
  // count as agreement whatever the standard error.
  report.z_score = combined > 0.0 ? (report.lhs - report.rhs) / combined : 0.0;
  report.pass = gap <= 3.0 * combined || gap <= 1e-12;
}

}  // namespace

GeneratorSpec killed_asg_generator(const DetParams& params) { return make_killed_generator(params); }
GeneratorSpec killed_asg_generator(const DiffusionParams& params) { return make_killed_generator(params); }

AbsorptionProfile absorption_profile(const DetParams& params, std::int64_t n, const McOptions& options) {
  return make_profile(params, n, options);
}

AbsorptionProfile absorption_profile(const DiffusionParams& params, std::int64_t n, const McOptions& options) {
  return make_profile(params, n, options);
}

namespace {

std::vector<double> solve_truncated_sampling_recursion(double sigma, double theta, double nu1, int truncation) {
  // Unknowns b(1..N-1); b(0) = 1 and b(N) = 0 enter through the right-hand side.
  const auto size = static_cast<std::size_t>(truncation - 1);
  std::vector<double> lower(size), diag(size), upper(size), rhs(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    const double n = static_cast<double>(k + 1);
    diag[k] = n - 1.0 + 2.0 * sigma + 2.0 * theta;
    upper[k] = -2.0 * sigma;
    lower[k] = -(n - 1.0 + 2.0 * theta * nu1);
  }
  rhs[0] = 2.0 * theta * nu1;
  std::vector<double> b = solve_tridiagonal(lower, diag, upper, rhs);
  b.insert(b.begin(), 1.0);
  b.push_back(0.0);
  return b;
}

}  // namespace

double sampling_recursion_residual(const std::vector<double>& b, double sigma, double theta, double nu1) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < b.size(); ++k) {
    const double n = static_cast<double>(k);
    const double lhs = (n - 1.0 + 2.0 * sigma + 2.0 * theta) * b[k];
    const double rhs = 2.0 * sigma * b[k + 1] + (n - 1.0 + 2.0 * theta * nu1) * b[k - 1];
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

SamplingRecursionSolution sampling_recursion_solve(double sigma, double theta, double nu1, RecursionOptions options) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma", "must be >= 0");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw ParameterError("theta", "must be > 0");
  if (!(nu1 >= 0.0 && nu1 <= 1.0)) throw ParameterError("nu1", "must lie in [0,1]");
  if (options.initial_truncation < 2) throw ParameterError("nmax", "must be >= 2");

  SamplingRecursionSolution solution;
  solution.outside_interpretation = nu1 == 0.0 || nu1 == 1.0;

  if (nu1 == 1.0) {
    // No killing: R is absorbed in 0 almost surely from every start.
    solution.truncation = options.initial_truncation;
    solution.b.assign(static_cast<std::size_t>(solution.truncation) + 1, 1.0);
    return solution;
  }
  if (sigma == 0.0) {
    solution.truncation = options.initial_truncation;
    solution.b.assign(static_cast<std::size_t>(solution.truncation) + 1, 1.0);
    for (int n = 1; n <= solution.truncation; ++n) {
      const double k = static_cast<double>(n - 1);
      solution.b[static_cast<std::size_t>(n)] =
          solution.b[static_cast<std::size_t>(n - 1)] * (k + 2.0 * theta * nu1) / (k + 2.0 * theta);
    }
    solution.max_residual = sampling_recursion_residual(solution.b, sigma, theta, nu1);
    return solution;
  }

  int truncation = options.initial_truncation;
  std::vector<double> coarse = solve_truncated_sampling_recursion(sigma, theta, nu1, truncation);
  while (2 * truncation <= options.max_truncation) {
    const int finer = 2 * truncation;
    std::vector<double> fine = solve_truncated_sampling_recursion(sigma, theta, nu1, finer);
    double change = 0.0;
    const std::size_t watched = std::min(coarse.size(), static_cast<std::size_t>(options.watch) + 1);
    for (std::size_t k = 0; k < watched; ++k) change = std::max(change, std::abs(coarse[k] - fine[k]));
    truncation = finer;
    if (change < options.tolerance) {
      solution.b = std::move(fine);
      solution.truncation = truncation;
      solution.convergence_change = change;
      solution.max_residual = sampling_recursion_residual(solution.b, sigma, theta, nu1);
      return solution;
    }
    coarse = std::move(fine);
  }
  throw ConvergenceError("sampling recursion did not settle below truncation " +
                         std::to_string(options.max_truncation));
}

double first_step_w(double s, double u, double nu1) {
  if (!(s >= 0.0) || !(u >= 0.0)) throw ParameterError("s", "s and u must be >= 0");
  if (!(s + u > 0.0)) throw ParameterError("u", "s + u must be > 0");
  if (!(nu1 >= 0.0 && nu1 <= 1.0)) throw ParameterError("nu1", "must lie in [0,1]");
  // Smaller root of s w^2 - (u+s) w + u nu1, in the cancellation-free form.
  const double b = u + s;
  const double disc = std::max(0.0, b * b - 4.0 * s * u * nu1);
  return 2.0 * u * nu1 / (b + std::sqrt(disc));
}

template <typename Params>
Estimate killed_asg_moment(const Params& params, double x, double t, std::int64_t n, const McOptions& options) {
  const auto samples = killed_moment_samples(params, x, t, n, options, 0, 1);
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) values.push_back(s.value);
  return mean_and_error(values);
}

template Estimate killed_asg_moment<DetParams>(const DetParams&, double, double, std::int64_t, const McOptions&);
template Estimate killed_asg_moment<DiffusionParams>(const DiffusionParams&, double, double, std::int64_t,
                                                     const McOptions&);

DualityReport duality_check(const DetParams& raw, double x, double t, std::int64_t n, const McOptions& options) {
  const DetParams params = validate(raw);
  const auto samples = killed_moment_samples(params, x, t, n, options, 0, 1);
  std::vector<double> values;
  values.reserve(samples.size());
  DualityReport report;
  for (const auto& s : samples) {
    values.push_back(s.value);
    report.censored += s.censored ? 1 : 0;
  }
  const Estimate backward = mean_and_error(values);
  report.replicates = options.replicates;
  report.lhs = std::pow(1.0 - solve_ode_at(params, x, t), static_cast<double>(n));
  report.rhs = backward.value;
  report.se_rhs = backward.standard_error;
  finish_report(report);
  return report;
}

DualityReport duality_check(const DiffusionParams& raw, double x, double t, std::int64_t n, const McOptions& options,
                            double dt) {
  const DiffusionParams params = validate(raw);
  const double step = dt > 0.0 ? dt : default_time_step(params);
  // Forward replicates use even stream indices, backward ones odd indices.
  const auto forward = run_replicates(options.replicates, options.threads, [&](std::uint64_t i) {
    RngStream rng(options.seed, 2 * i);
    return std::pow(1.0 - simulate_wf(params, x, t, step, rng), static_cast<double>(n));
  });
  const auto samples = killed_moment_samples(params, x, t, n, options, 1, 2);
  std::vector<double> values;
  values.reserve(samples.size());
  DualityReport report;
  for (const auto& s : samples) {
    values.push_back(s.value);
    report.censored += s.censored ? 1 : 0;
  }
  const Estimate lhs = mean_and_error(forward);
  const Estimate rhs = mean_and_error(values);
  report.replicates = options.replicates;
  report.lhs = lhs.value;
  report.se_lhs = lhs.standard_error;
  report.rhs = rhs.value;
  report.se_rhs = rhs.standard_error;
  finish_report(report);
  return report;
}

}  // namespace lod
