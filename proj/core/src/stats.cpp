#include "lod/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <numeric>
#include <stdexcept>

namespace lod {

ChiSquareResult chi_square_test(const std::vector<std::uint64_t>& observed, const std::vector<double>& expected,
                                double min_expected) {
  if (observed.empty() || observed.size() != expected.size()) {
    throw std::invalid_argument("chi_square_test: observed and expected sizes differ");
  }
  const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  if (total <= 0.0) throw std::invalid_argument("chi_square_test: no observations");

  std::vector<double> probs = expected;
  const double covered = std::accumulate(probs.begin(), probs.end(), 0.0);
  probs.back() += std::max(0.0, 1.0 - covered);

  std::vector<double> obs_cells;
  std::vector<double> exp_cells;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    obs_acc += static_cast<double>(observed[k]);
    exp_acc += probs[k] * total;
    if (exp_acc >= min_expected) {
      obs_cells.push_back(obs_acc);
      exp_cells.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(obs_acc);
      exp_cells.push_back(exp_acc);
    } else {
      obs_cells.back() += obs_acc;
      exp_cells.back() += exp_acc;
    }
  }

  ChiSquareResult result;
  result.bins = static_cast<int>(exp_cells.size());
  for (std::size_t k = 0; k < exp_cells.size(); ++k) {
    const double d = obs_cells[k] - exp_cells[k];
    result.statistic += d * d / exp_cells[k];
  }
  result.degrees_of_freedom = result.bins - 1;
  if (result.degrees_of_freedom >= 1) {
    boost::math::chi_squared dist(result.degrees_of_freedom);
    result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  }
  return result;
}

}  // namespace lod
