#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

namespace lod {

/// Raised when a parameter record violates one of its invariants.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised when a parameter combination falls outside the regime an
/// operation is defined for (e.g. no stationary law exists).
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an iterative numerical method fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SelectionMode { fecundity, viability };
enum class Limit { deterministic, diffusion };

const char* to_string(SelectionMode mode);
const char* to_string(Limit limit);
SelectionMode parse_selection_mode(const std::string& text);
Limit parse_limit(const std::string& text);

/// Finite-N Moran model. Type 0 is beneficial: it reproduces at rate 1/2 + s
/// under fecundity selection, and type 1 dies at rate 1/2 + s under
/// viability selection.
struct MoranParams {
  std::int64_t population_size = 1;
  double s = 0.0;
  double u = 0.0;
  double nu0 = 0.5;
  double nu1 = 0.5;
  SelectionMode selection_mode = SelectionMode::fecundity;

  double birth_rate(int type) const;
  double death_rate(int type) const;
};

/// Deterministic (law of large numbers) limit: unscaled s, u.
struct DetParams {
  double s = 0.0;
  double u = 0.0;
  double nu0 = 0.5;
  double nu1 = 0.5;
};

/// Diffusion limit: sigma = lim N s, theta = lim N u.
struct DiffusionParams {
  double sigma = 0.0;
  double theta = 0.0;
  double nu0 = 0.5;
  double nu1 = 0.5;
};

/// Tolerance on |nu0 + nu1 - 1| accepted before normalizing nu1 = 1 - nu0.
inline constexpr double kMutationSumTolerance = 1e-12;

MoranParams validate(MoranParams params);
DetParams validate(DetParams params);
DiffusionParams validate(DiffusionParams params);

DiffusionParams scale_to_diffusion(const MoranParams& moran);

/// Reads `key=value` lines. Blank lines and lines starting with '#' are
/// skipped; surrounding whitespace is trimmed. Later keys override earlier.
std::map<std::string, std::string> parse_key_values(std::istream& in);

}  // namespace lod
