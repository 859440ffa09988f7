#pragma once

#include <span>
#include <vector>

namespace lod {

/// Solves a tridiagonal system by forward elimination and back
/// substitution (Thomas algorithm). Row i reads
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i],
/// with lower[0] and upper[n-1] ignored. Intended for diagonally dominant
/// systems, where no pivoting is needed.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

}  // namespace lod
