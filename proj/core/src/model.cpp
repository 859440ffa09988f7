#include "lod/model.hpp"

#include <cmath>
#include <istream>
#include <string_view>

namespace lod {

namespace {

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) throw ParameterError(field, "must be finite");
}

void require_non_negative(double value, const char* field) {
  require_finite(value, field);
  if (value < 0.0) throw ParameterError(field, "must be >= 0");
}

// Checks nu0, nu1 in [0,1] and nu0 + nu1 = 1 up to kMutationSumTolerance,
// then snaps nu1 to 1 - nu0.
void check_mutation_targets(double& nu0, double& nu1) {
  require_finite(nu0, "nu0");
  require_finite(nu1, "nu1");
  if (nu0 < 0.0 || nu0 > 1.0) throw ParameterError("nu0", "must lie in [0,1]");
  if (nu1 < 0.0 || nu1 > 1.0) throw ParameterError("nu1", "must lie in [0,1]");
  if (std::abs(nu0 + nu1 - 1.0) > kMutationSumTolerance) {
    throw ParameterError("nu0+nu1", "must equal 1");
  }
  nu1 = 1.0 - nu0;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

}  // namespace

const char* to_string(SelectionMode mode) {
  return mode == SelectionMode::fecundity ? "fecundity" : "viability";
}

const char* to_string(Limit limit) {
  return limit == Limit::deterministic ? "det" : "diff";
}

SelectionMode parse_selection_mode(const std::string& text) {
  if (text == "fecundity") return SelectionMode::fecundity;
  if (text == "viability") return SelectionMode::viability;
  throw ParameterError("selection_mode", "expected 'fecundity' or 'viability', got '" + text + "'");
}

Limit parse_limit(const std::string& text) {
  if (text == "det" || text == "deterministic") return Limit::deterministic;
  if (text == "diff" || text == "diffusion") return Limit::diffusion;
  throw ParameterError("limit", "expected 'det' or 'diff', got '" + text + "'");
}

double MoranParams::birth_rate(int type) const {
  if (selection_mode == SelectionMode::viability) return 0.5;
  return type == 0 ? 0.5 + s : 0.5;
}

double MoranParams::death_rate(int type) const {
  if (selection_mode == SelectionMode::fecundity) return 0.5;
  return type == 1 ? 0.5 + s : 0.5;
}

MoranParams validate(MoranParams params) {
  if (params.population_size < 1) throw ParameterError("N", "must be >= 1");
  require_non_negative(params.s, "s");
  require_non_negative(params.u, "u");
  check_mutation_targets(params.nu0, params.nu1);
  return params;
}

DetParams validate(DetParams params) {
  require_non_negative(params.s, "s");
  require_non_negative(params.u, "u");
  check_mutation_targets(params.nu0, params.nu1);
  return params;
}

DiffusionParams validate(DiffusionParams params) {
  require_non_negative(params.sigma, "sigma");
  require_non_negative(params.theta, "theta");
  check_mutation_targets(params.nu0, params.nu1);
  return params;
}

DiffusionParams scale_to_diffusion(const MoranParams& moran) {
  const MoranParams checked = validate(moran);
  const auto n = static_cast<double>(checked.population_size);
  return DiffusionParams{n * checked.s, n * checked.u, checked.nu0, checked.nu1};
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("line " + std::to_string(line_number), "expected key=value");
    }
    const auto key = trim(body.substr(0, eq));
    if (key.empty()) throw ParameterError("line " + std::to_string(line_number), "empty key");
    values[std::string(key)] = std::string(trim(body.substr(eq + 1)));
  }
  return values;
}

}  // namespace lod
