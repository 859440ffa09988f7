#pragma once

#include <cstdint>
#include <vector>

#include "lod/ctmc.hpp"
#include "lod/model.hpp"

namespace lod {

/// Per-state rates of the killed ASG line-counting process R out of n lines.
struct KilledRates {
  double up = 0.0;    // branching, n -> n+1
  double down = 0.0;  // coalescence and pruning, n -> n-1
  double kill = 0.0;  // beneficial mutation, n -> cemetery
};

/// Deterministic limit: up n s, down n u nu1, kill n u nu0.
KilledRates killed_asg_rates(const DetParams& params, std::int64_t n);
/// Diffusion limit: up n sigma, down n(n-1)/2 + n theta nu1, kill n theta nu0.
KilledRates killed_asg_rates(const DiffusionParams& params, std::int64_t n);

GeneratorSpec killed_asg_generator(const DetParams& params);
GeneratorSpec killed_asg_generator(const DiffusionParams& params);

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

struct McOptions {
  std::uint64_t replicates = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  StopRule caps{};
};

struct AbsorptionProfile {
  Estimate to_zero;
  Estimate to_cemetery;
  Estimate diverged;
  double censored_fraction = 0.0;
  std::uint64_t replicates = 0;
};

/// Monte Carlo absorption probabilities of R started from n >= 1 lines.
AbsorptionProfile absorption_profile(const DetParams& params, std::int64_t n, const McOptions& options);
AbsorptionProfile absorption_profile(const DiffusionParams& params, std::int64_t n, const McOptions& options);

struct RecursionOptions {
  int initial_truncation = 64;
  int max_truncation = 1 << 22;
  /// Accept when doubling the truncation moves none of the entries
  /// 1..watch by more than this.
  double tolerance = 1e-13;
  int watch = 20;
};

/// b(n) = P(R absorbs in 0 | R_0 = n) = E[(1 - X_inf)^n], n = 0..truncation.
struct SamplingRecursionSolution {
  std::vector<double> b;
  int truncation = 0;
  /// Largest change of a watched entry at the last doubling.
  double convergence_change = 0.0;
  /// Largest residual of the recursion over interior n.
  double max_residual = 0.0;
  /// nu0 in {0, 1}: the absorption probabilities are still computed, but
  /// the genealogical reading of the moments does not apply.
  bool outside_interpretation = false;
};

/// Solves
///   (n-1+2 sigma+2 theta) b(n) = 2 sigma b(n+1) + (n-1+2 theta nu1) b(n-1)
/// with b(0) = 1, b(n) -> 0, as a truncated tridiagonal boundary-value
/// problem (b(N) = 0), doubling N until the solution settles. For sigma = 0
/// the recursion is one-step and is evaluated as a product.
SamplingRecursionSolution sampling_recursion_solve(double sigma, double theta, double nu1,
                                                   RecursionOptions options = {});

/// Largest absolute residual of the sampling recursion over 1 <= n < size-1.
double sampling_recursion_residual(const std::vector<double>& b, double sigma, double theta, double nu1);

/// Probability that the deterministic-limit killed ASG started from one line
/// absorbs in 0: the root in [0,1] of s w^2 - (u+s) w + u nu1 = 0.
double first_step_w(double s, double u, double nu1);

/// Forward side vs. backward side of the moment duality
///   E[(1 - X_t)^n | X_0 = x] = E[(1 - x)^{R_t} | R_0 = n],  (1-x)^Δ = 0.
struct DualityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double se_lhs = 0.0;
  double se_rhs = 0.0;
  double z_score = 0.0;
  bool pass = false;
  std::uint64_t replicates = 0;
  std::uint64_t censored = 0;
};

/// Deterministic limit: the forward side is exact, (1 - z(t; x))^n.
DualityReport duality_check(const DetParams& params, double x, double t, std::int64_t n, const McOptions& options);

/// Diffusion limit: both sides by Monte Carlo; the forward side uses
/// Euler-Maruyama with step dt (0 selects default_time_step).
DualityReport duality_check(const DiffusionParams& params, double x, double t, std::int64_t n,
                            const McOptions& options, double dt = 0.0);

/// Backward side alone: mean and standard error of (1 - x)^{R_t}.
template <typename Params>
Estimate killed_asg_moment(const Params& params, double x, double t, std::int64_t n, const McOptions& options);

}  // namespace lod
