#pragma once

#include <span>
#include <vector>

#include "lod/model.hpp"

namespace lod {

/// Right-hand side of the mutation-selection equation
///   dz/dt = s z (1 - z) + u nu0 (1 - z) - u nu1 z.
double riccati_rhs(const DetParams& params, double z);

struct OdeSolution {
  DetParams params;
  double initial = 0.0;
  std::vector<double> times;
  std::vector<double> values;
};

struct OdeOptions {
  double absolute_tolerance = 1e-10;
  double relative_tolerance = 1e-10;
};

/// Integrates from z(0) = x and reports z at every grid time (grid must be
/// non-decreasing and start at or after 0). Uses an adaptive Dormand-Prince
/// 5(4) pair. Throws ConvergenceError if the solution leaves [0,1] by more
/// than the solver tolerance.
OdeSolution solve_ode(const DetParams& params, double x, std::span<const double> grid, OdeOptions options = {});

/// Value at a single time.
double solve_ode_at(const DetParams& params, double x, double t, OdeOptions options = {});

enum class EquilibriumRegime { interior, threshold_zero };

struct EquilibriumValue {
  double z_inf = 0.0;
  EquilibriumRegime regime = EquilibriumRegime::interior;
};

/// Stationary proportion of type 0 in the deterministic limit. For s > 0
/// this is the root of the right-hand side in [0,1]; for s = 0 it is nu0.
/// With nu0 = 0 it reduces to the error-threshold form max(0, 1 - u/s).
EquilibriumValue z_infinity(const DetParams& params);

struct ThresholdPoint {
  double u = 0.0;
  double z_inf = 0.0;
};

/// z_inf along a grid of mutation rates at fixed s > 0.
std::vector<ThresholdPoint> error_threshold_curve(double s, std::span<const double> u_grid, double nu0 = 0.0);

}  // namespace lod
