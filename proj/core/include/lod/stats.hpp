#pragma once

#include <cstdint>
#include <vector>

namespace lod {

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  int bins = 0;
};

/// Pearson goodness-of-fit of observed counts against cell probabilities.
/// Adjacent cells are pooled from the right until each expected count is at
/// least `min_expected`; probability mass not covered by `expected` is added
/// to the last cell.
ChiSquareResult chi_square_test(const std::vector<std::uint64_t>& observed, const std::vector<double>& expected,
                                double min_expected = 5.0);

}  // namespace lod
