#include "lod/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace lod {

double riccati_rhs(const DetParams& p, double z) {
  return p.s * z * (1.0 - z) + p.u * p.nu0 * (1.0 - z) - p.u * p.nu1 * z;
}

OdeSolution solve_ode(const DetParams& raw, double x, std::span<const double> grid, OdeOptions options) {
  namespace odeint = boost::numeric::odeint;
  const DetParams params = validate(raw);
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("x", "must lie in [0,1]");
  if (!grid.empty() && grid.front() < 0.0) throw ParameterError("t", "grid must start at or after 0");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ParameterError("t", "grid must be non-decreasing");

  OdeSolution solution;
  solution.params = params;
  solution.initial = x;
  if (grid.empty()) return solution;

  // odeint wants the initial time as the first observation point.
  std::vector<double> times;
  times.reserve(grid.size() + 1);
  const bool prepend = grid.front() > 0.0;
  if (prepend) times.push_back(0.0);
  times.insert(times.end(), grid.begin(), grid.end());

  using Stepper = odeint::runge_kutta_dopri5<double>;
  auto stepper = odeint::make_controlled<Stepper>(options.absolute_tolerance, options.relative_tolerance);
  double state = x;
  std::vector<double> observed;
  observed.reserve(times.size());
  auto rhs = [&params](const double& z, double& dzdt, double) { dzdt = riccati_rhs(params, z); };
  auto observer = [&observed](const double& z, double) { observed.push_back(z); };
  const double first_step = std::min(1e-3, std::max(1e-8, (times.back() - times.front()) * 1e-6));
  odeint::integrate_times(stepper, rhs, state, times.begin(), times.end(), first_step, observer);

  const double slack = 100.0 * options.absolute_tolerance;
  solution.times.assign(grid.begin(), grid.end());
  solution.values.assign(observed.begin() + (prepend ? 1 : 0), observed.end());
  for (double& z : solution.values) {
    if (z < -slack || z > 1.0 + slack || !std::isfinite(z)) {
      throw ConvergenceError("ODE solution left [0,1]: z = " + std::to_string(z));
    }
    z = std::clamp(z, 0.0, 1.0);
  }
  return solution;
}

double solve_ode_at(const DetParams& params, double x, double t, OdeOptions options) {
  if (t == 0.0) return x;
  const double grid[] = {t};
  return solve_ode(params, x, grid, options).values.front();
}

EquilibriumValue z_infinity(const DetParams& raw) {
  const DetParams p = validate(raw);
  if (p.s == 0.0) return {p.nu0, p.nu0 == 0.0 ? EquilibriumRegime::threshold_zero : EquilibriumRegime::interior};
  const double r = p.u / p.s;
  if (p.nu0 == 0.0) {
    const double z = std::max(0.0, 1.0 - r);
    return {z, z == 0.0 ? EquilibriumRegime::threshold_zero : EquilibriumRegime::interior};
  }
  // z = ((1 - r) + sqrt((1 - r)^2 + 4 r nu0)) / 2, rewritten to avoid
  // cancellation when 1 - r is negative.
  const double a = 1.0 - r;
  const double root = std::sqrt(a * a + 4.0 * r * p.nu0);
  const double z = a >= 0.0 ? 0.5 * (a + root) : 2.0 * r * p.nu0 / (root - a);
  return {std::clamp(z, 0.0, 1.0), EquilibriumRegime::interior};
}

std::vector<ThresholdPoint> error_threshold_curve(double s, std::span<const double> u_grid, double nu0) {
  if (!(s > 0.0)) throw ParameterError("s", "must be > 0");
  std::vector<ThresholdPoint> curve;
  curve.reserve(u_grid.size());
  for (double u : u_grid) curve.push_back({u, z_infinity(DetParams{s, u, nu0, 1.0 - nu0}).z_inf});
  return curve;
}

}  // namespace lod
