#pragma once

#include <functional>
#include <vector>

#include "lod/model.hpp"
#include "lod/rng.hpp"

namespace lod {

/// Drift sigma x(1-x) + theta nu0 (1-x) - theta nu1 x.
double drift(const DiffusionParams& params, double x);

/// Second-order generator coefficient x(1-x)/2, so the generator reads
/// drift f' + diffusion_coefficient f'' and the SDE noise is
/// sqrt(2 * diffusion_coefficient) dW = sqrt(x(1-x)) dW.
double diffusion_coefficient(double x);

/// Default Euler-Maruyama step 1e-3 / max(1, sigma, theta).
double default_time_step(const DiffusionParams& params);

struct DiffusionPath {
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> times;
  std::vector<double> values;
};

/// X_t from X_0 = x by Euler-Maruyama with clamping to [0,1] after each
/// step. With theta nu0 = 0 the state 0 is exactly absorbing, and with
/// theta nu1 = 0 so is 1. The final partial step is shortened to land on t.
double simulate_wf(const DiffusionParams& params, double x, double t, double dt, RngStream& rng);

/// Same as simulate_wf, recording every step.
DiffusionPath simulate_wf_path(const DiffusionParams& params, double x, double t, double dt, RngStream& rng);

/// Probability of absorption in 1 for theta = 0:
/// (1 - exp(-2 sigma x)) / (1 - exp(-2 sigma)), equal to x at sigma = 0.
double fixation_probability(double sigma, double x);

struct QuadratureOptions {
  int initial_nodes = 200;
  int max_nodes = 25'600;
  double tolerance = 1e-10;
};

/// Moments of Wright's stationary density
///   pi(x) = C x^(2 theta nu0 - 1) (1-x)^(2 theta nu1 - 1) exp(2 sigma x).
struct WrightMoments {
  /// log of C (C itself may over- or underflow for large sigma).
  double log_normalizing_constant = 0.0;
  double normalizing_constant = 0.0;
  /// moments[n] = E[(1 - X)^n], n = 0..n_max.
  std::vector<double> moments;
  double mean = 0.0;
  int nodes = 0;
  /// max |m_q(n) - m_2q(n)| / m_2q(n) at the accepted node count.
  double self_consistency = 0.0;
};

/// Requires theta > 0 and 0 < nu0 < 1; throws RegimeError otherwise.
/// Gauss-Jacobi quadrature carries the non-smooth endpoint factors in its
/// weight; the node count doubles until two successive rules agree.
WrightMoments wright_moments(const DiffusionParams& params, int n_max, QuadratureOptions options = {});

/// Same quadrature at a fixed node count (no doubling).
WrightMoments wright_moments_fixed(const DiffusionParams& params, int n_max, int nodes);

/// E[f(X)] under Wright's density, by the same quadrature.
double wright_expectation(const DiffusionParams& params, const std::function<double(double)>& f,
                          QuadratureOptions options = {});

}  // namespace lod
