#include "lod/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace lod {

namespace {

// Monic Jacobi recurrence on [-1,1] for (1-t)^(a-1) (1+t)^(b-1), written in
// the shape parameters a, b > 0 so that exponents close to -1 keep their
// relative accuracy.
// a + b is formed before any integer is added to it.
double diagonal_coefficient(int k, double a, double b) {
  const double ab = a + b;
  if (k == 0) return (b - a) / ab;
  const double t = 2.0 * (k - 1) + ab;
  return (b - a) * (ab - 2.0) / (t * (t + 2.0));
}

double offdiagonal_squared(int k, double a, double b) {
  const double ab = a + b;
  if (k == 1) return 4.0 * a * b / (ab * ab * (ab + 1.0));
  const double t = 2.0 * (k - 1) + ab;
  return 4.0 * k * ((k - 1) + a) * ((k - 1) + b) * ((k - 2) + ab) / (t * t * (t + 1.0) * (t - 1.0));
}

// GSL rule type whose alpha/beta slots carry the shapes (right, left). GSL
// diagonalises the matrix and takes the weights from the first eigenvector
// components; the total mass is set to 1 and restored by normalisation.
int shape_check(const size_t, const gsl_integration_fixed_params* params) {
  return params->alpha > 0.0 && params->beta > 0.0 ? GSL_SUCCESS : GSL_EDOM;
}

int shape_init(const size_t n, double* diag, double* subdiag, gsl_integration_fixed_params* params) {
  const double a = params->alpha;
  const double b = params->beta;
  for (std::size_t k = 0; k < n; ++k) {
    diag[k] = diagonal_coefficient(static_cast<int>(k), a, b);
    subdiag[k] = std::sqrt(offdiagonal_squared(static_cast<int>(k) + 1, a, b));
  }
  params->zemu = 1.0;
  params->shft = 0.5 * (params->b + params->a);
  params->slp = 0.5 * (params->b - params->a);
  params->al = 0.0;
  params->be = 0.0;
  return GSL_SUCCESS;
}

const gsl_integration_fixed_type kShapeRule = {shape_check, shape_init};

std::vector<double> ascending_nodes_and_weights(int points, double left_shape, double right_shape,
                                                std::vector<double>* weights) {
  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> workspace(
      gsl_integration_fixed_alloc(&kShapeRule, static_cast<std::size_t>(points), 0.0, 1.0, right_shape, left_shape),
      &gsl_integration_fixed_free);
  gsl_set_error_handler(previous);
  if (!workspace) throw std::runtime_error("gauss_jacobi: eigenvalue solver failed");
  const double* x = gsl_integration_fixed_nodes(workspace.get());
  if (weights != nullptr) {
    const double* w = gsl_integration_fixed_weights(workspace.get());
    weights->assign(w, w + points);
  }
  return {x, x + points};
}

}  // namespace

GaussJacobiRule gauss_jacobi(int points, double left_exponent, double right_exponent) {
  if (!(left_exponent > -1.0) || !(right_exponent > -1.0)) {
    throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
  }
  return gauss_jacobi_beta(points, left_exponent + 1.0, right_exponent + 1.0);
}

GaussJacobiRule gauss_jacobi_beta(int points, double left_shape, double right_shape) {
  if (points < 1) throw std::invalid_argument("gauss_jacobi: need at least one node");
  if (!(left_shape > 0.0) || !(right_shape > 0.0) || !std::isfinite(left_shape) || !std::isfinite(right_shape)) {
    throw std::invalid_argument("gauss_jacobi: shapes must be positive");
  }

  GaussJacobiRule rule;
  rule.nodes = ascending_nodes_and_weights(points, left_shape, right_shape, &rule.weights);
  // Nodes near 1 lose their distance to 1 in rounding; the mirrored rule
  // has them as small nodes at full relative accuracy.
  const std::vector<double> mirrored = ascending_nodes_and_weights(points, right_shape, left_shape, nullptr);
  rule.complements.resize(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double reflected = mirrored[rule.nodes.size() - 1 - i];
    if (rule.nodes[i] > 0.5) {
      rule.complements[i] = reflected;
      rule.nodes[i] = 1.0 - reflected;
    } else {
      rule.complements[i] = 1.0 - rule.nodes[i];
    }
  }
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  rule.log_mass = std::lgamma(left_shape) + std::lgamma(right_shape) - std::lgamma(left_shape + right_shape);
  return rule;
}

}  // namespace lod
