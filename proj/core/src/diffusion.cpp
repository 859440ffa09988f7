#include "lod/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lod/quadrature.hpp"

namespace lod {

double drift(const DiffusionParams& p, double x) {
  return p.sigma * x * (1.0 - x) + p.theta * p.nu0 * (1.0 - x) - p.theta * p.nu1 * x;
}

double diffusion_coefficient(double x) { return 0.5 * x * (1.0 - x); }

double default_time_step(const DiffusionParams& p) {
  return 1e-3 / std::max({1.0, p.sigma, p.theta});
}

namespace {

double euler_maruyama_step(const DiffusionParams& p, double x, double h, RngStream& rng) {
  const double noise = std::sqrt(2.0 * diffusion_coefficient(x) * h);
  const double next = x + drift(p, x) * h + noise * rng.normal();
  return std::clamp(next, 0.0, 1.0);
}

void check_path_arguments(double x, double t, double dt) {
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("x", "must lie in [0,1]");
  if (!(t >= 0.0)) throw ParameterError("t", "must be >= 0");
  if (!(dt > 0.0)) throw ParameterError("dt", "must be > 0");
}

}  // namespace

double simulate_wf(const DiffusionParams& raw, double x, double t, double dt, RngStream& rng) {
  const DiffusionParams p = validate(raw);
  check_path_arguments(x, t, dt);
  const auto full_steps = static_cast<std::uint64_t>(std::floor(t / dt));
  double state = x;
  for (std::uint64_t k = 0; k < full_steps; ++k) state = euler_maruyama_step(p, state, dt, rng);
  const double rest = t - static_cast<double>(full_steps) * dt;
  if (rest > 1e-15 * std::max(1.0, t)) state = euler_maruyama_step(p, state, rest, rng);
  return state;
}

DiffusionPath simulate_wf_path(const DiffusionParams& raw, double x, double t, double dt, RngStream& rng) {
  const DiffusionParams p = validate(raw);
  check_path_arguments(x, t, dt);
  DiffusionPath path;
  path.dt = dt;
  path.seed = rng.seed();
  path.stream = rng.index();
  path.times.push_back(0.0);
  path.values.push_back(x);
  double time = 0.0;
  double state = x;
  while (time < t) {
    const double h = std::min(dt, t - time);
    if (h <= 1e-15 * std::max(1.0, t)) break;
    state = euler_maruyama_step(p, state, h, rng);
    time += h;
    path.times.push_back(time);
    path.values.push_back(state);
  }
  return path;
}

double fixation_probability(double sigma, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("x", "must lie in [0,1]");
  if (!(sigma >= 0.0)) throw ParameterError("sigma", "must be >= 0");
  if (x == 0.0 || x == 1.0 || sigma == 0.0) return x;
  return std::expm1(-2.0 * sigma * x) / std::expm1(-2.0 * sigma);
}

namespace {

// Splits an endpoint factor x^(a-1), a > 0, into a Beta shape in (0, 1] for
// the weight and a non-negative integer power that stays in the smooth
// factor.
struct ExponentSplit {
  double shape = 1.0;
  double power = 0.0;
};

ExponentSplit split_shape(double a) {
  if (a <= 1.0) return {a, 0.0};
  const double k = std::ceil(a - 1.0);
  return {a - k, k};
}

// Quadrature of the Wright density on one fixed rule. The density is
// x^(a-1) (1-x)^(b-1) g(x) with shapes a, b in (0,1] and g smooth. For small
// shapes nearly all mass sits at the endpoints, so the linear interpolant of
// the integrand through x = 0 and x = 1 is integrated exactly and only the
// remainder r(x) = (G(x) - G(0)(1-x) - G(1)x) / (x(1-x)) goes to a
// Gauss-Jacobi rule for the better conditioned weight x^a (1-x)^b:
//   E[G] = G(0) b/(a+b) + G(1) a/(a+b) + ab/((a+b)(a+b+1)) E'[r].
struct WrightRule {
  GaussJacobiRule inner;
  double a = 1.0;
  double b = 1.0;
  std::vector<double> log_factor;  // log g at the inner nodes
  double log_at_zero = 0.0;
  double log_at_one = 0.0;
  double shift = 0.0;
  double mass = 0.0;  // E[g] exp(-shift) under the normalised Beta(a, b) weight

  // E[g h] exp(-shift) for h given at the endpoints and at each inner node.
  template <typename NodeValue>
  double integrate(double h0, double h1, NodeValue&& h) const {
    const double g0 = h0 == 0.0 ? 0.0 : std::exp(log_at_zero - shift) * h0;
    const double g1 = h1 == 0.0 ? 0.0 : std::exp(log_at_one - shift) * h1;
    double remainder = 0.0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const double x = inner.nodes[i];
      const double c = inner.complements[i];
      const double gi = std::exp(log_factor[i] - shift) * h(i);
      remainder += inner.weights[i] * (gi - g0 * c - g1 * x) / (x * c);
    }
    const double ab = a + b;
    return g0 * b / ab + g1 * a / ab + a * b / (ab * (ab + 1.0)) * remainder;
  }
};

WrightRule make_wright_rule(const DiffusionParams& p, int nodes) {
  const auto left = split_shape(2.0 * p.theta * p.nu0);
  const auto right = split_shape(2.0 * p.theta * p.nu1);
  WrightRule w;
  w.a = left.shape;
  w.b = right.shape;
  w.inner = gauss_jacobi_beta(nodes, w.a + 1.0, w.b + 1.0);
  const double minus_inf = -std::numeric_limits<double>::infinity();
  w.log_at_zero = left.power > 0.0 ? minus_inf : 0.0;
  w.log_at_one = right.power > 0.0 ? minus_inf : 2.0 * p.sigma;
  w.shift = std::max(w.log_at_zero, w.log_at_one);
  w.log_factor.resize(w.inner.size());
  for (std::size_t i = 0; i < w.inner.size(); ++i) {
    const double x = w.inner.nodes[i];
    double value = 2.0 * p.sigma * x;
    if (left.power > 0.0) value += left.power * std::log(x);
    if (right.power > 0.0) value += right.power * std::log(w.inner.complements[i]);
    w.log_factor[i] = value;
    w.shift = std::max(w.shift, value);
  }
  w.mass = w.integrate(1.0, 1.0, [](std::size_t) { return 1.0; });
  return w;
}

void require_wright_regime(const DiffusionParams& p) {
  if (!(p.theta > 0.0)) throw RegimeError("Wright's distribution requires theta > 0");
  if (!(p.nu0 > 0.0 && p.nu0 < 1.0)) throw RegimeError("Wright's distribution requires 0 < nu0 < 1");
}

}  // namespace

WrightMoments wright_moments_fixed(const DiffusionParams& raw, int n_max, int nodes) {
  const DiffusionParams p = validate(raw);
  require_wright_regime(p);
  if (n_max < 0) throw ParameterError("nmax", "must be >= 0");
  const WrightRule w = make_wright_rule(p, nodes);

  WrightMoments result;
  result.nodes = nodes;
  result.moments.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  result.moments[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const double sum = w.integrate(1.0, 0.0, [&](std::size_t i) { return std::pow(w.inner.complements[i], n); });
    result.moments[static_cast<std::size_t>(n)] = std::clamp(sum / w.mass, 0.0, 1.0);
  }
  const double log_beta = std::lgamma(w.a) + std::lgamma(w.b) - std::lgamma(w.a + w.b);
  result.log_normalizing_constant = -(log_beta + w.shift + std::log(w.mass));
  result.normalizing_constant = std::exp(result.log_normalizing_constant);
  result.mean = n_max >= 1 ? 1.0 - result.moments[1] : 1.0 - wright_moments_fixed(p, 1, nodes).moments[1];
  return result;
}

namespace {

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < std::numeric_limits<double>::min()) return 0.0;
  return std::abs(a - b) / scale;
}

}  // namespace

WrightMoments wright_moments(const DiffusionParams& params, int n_max, QuadratureOptions options) {
  WrightMoments coarse = wright_moments_fixed(params, std::max(n_max, 1), options.initial_nodes);
  for (int nodes = 2 * options.initial_nodes; nodes <= options.max_nodes; nodes *= 2) {
    WrightMoments fine = wright_moments_fixed(params, std::max(n_max, 1), nodes);
    double gap = 0.0;
    for (std::size_t n = 0; n < fine.moments.size(); ++n) {
      gap = std::max(gap, relative_gap(coarse.moments[n], fine.moments[n]));
    }
    gap = std::max(gap, std::abs(coarse.log_normalizing_constant - fine.log_normalizing_constant));
    if (gap <= options.tolerance) {
      fine.self_consistency = gap;
      fine.moments.resize(static_cast<std::size_t>(n_max) + 1);
      return fine;
    }
    coarse = std::move(fine);
  }
  throw ConvergenceError("Wright moments did not converge within " + std::to_string(options.max_nodes) + " nodes");
}

double wright_expectation(const DiffusionParams& raw, const std::function<double(double)>& f,
                          QuadratureOptions options) {
  const DiffusionParams p = validate(raw);
  require_wright_regime(p);
  auto evaluate = [&](int nodes) {
    const WrightRule w = make_wright_rule(p, nodes);
    return w.integrate(f(0.0), f(1.0), [&](std::size_t i) { return f(w.inner.nodes[i]); }) / w.mass;
  };
  double coarse = evaluate(options.initial_nodes);
  for (int nodes = 2 * options.initial_nodes; nodes <= options.max_nodes; nodes *= 2) {
    const double fine = evaluate(nodes);
    if (relative_gap(coarse, fine) <= options.tolerance) return fine;
    coarse = fine;
  }
  throw ConvergenceError("Wright expectation did not converge within " + std::to_string(options.max_nodes) +
                         " nodes");
}

}  // namespace lod
