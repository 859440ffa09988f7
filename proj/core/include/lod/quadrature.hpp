#pragma once

#include <vector>

namespace lod {

/// Gauss-Jacobi rule on [0,1] for the weight x^left (1-x)^right
/// (exponents > -1). Weights are normalised to sum to one; the weight's
/// total mass B(left+1, right+1) is kept separately as its logarithm.
struct GaussJacobiRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// 1 - nodes[i], accurate also for nodes next to 1.
  std::vector<double> complements;
  double log_mass = 0.0;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Golub-Welsch construction: nodes are the eigenvalues of the Jacobi
/// matrix, weights the squared first components of its eigenvectors
/// (GSL's implicit QL). Nodes ascend.
GaussJacobiRule gauss_jacobi(int points, double left_exponent, double right_exponent);

/// Same rule for the Beta-shaped weight x^(left-1) (1-x)^(right-1), shapes
/// > 0. Prefer this form when an exponent is within rounding of -1.
GaussJacobiRule gauss_jacobi_beta(int points, double left_shape, double right_shape);

}  // namespace lod
