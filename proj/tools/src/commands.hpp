#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <json.hpp>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lod/model.hpp"

namespace lod::cli {

/// Raised for output files that cannot be opened.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::optional<double> s, u, nu0, nu1, sigma, theta, x, t, tol, dt;
  std::optional<std::string> population;  // --N, one value or a list
  std::optional<std::int64_t> n;
  std::optional<int> nmax;
  std::optional<std::uint64_t> reps;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out;
  std::string limit = "det";
  std::string mode = "fecundity";
  std::string grid;
  std::string figure;
  std::string x_rule = "fixed";
};

/// State shared by a subcommand run: resolved options, the open output
/// stream, and what goes into the manifest.
class Context {
 public:
  Context(Options options, std::ostream& stdout_stream);

  const Options& options() const { return options_; }
  std::uint64_t seed() const { return seed_; }

  /// Stream for the primary output: --out if given, stdout otherwise.
  std::ostream& output();
  void finish();

  nlohmann::json& result() { return result_; }
  const nlohmann::json& result() const { return result_; }
  const std::vector<std::string>& outputs() const { return outputs_; }

  DetParams det_params() const;
  DiffusionParams diffusion_params() const;
  MoranParams moran_params() const;
  Limit limit() const { return parse_limit(options_.limit); }
  /// Resolved replicate count; remembered for the manifest.
  std::uint64_t replicates(std::uint64_t fallback) {
    resolved_replicates_ = options_.reps.value_or(fallback);
    return resolved_replicates_;
  }
  std::uint64_t resolved_replicates() const { return resolved_replicates_; }

 private:
  Options options_;
  std::uint64_t seed_;
  std::ostream& stdout_;
  std::unique_ptr<std::ofstream> file_;
  std::vector<std::string> outputs_;
  std::uint64_t resolved_replicates_ = 0;
  nlohmann::json result_ = nlohmann::json::object();
};

std::int64_t single_population(const Options& options);

int cmd_moran(Context& ctx);
int cmd_ode(Context& ctx);
int cmd_equilibrium(Context& ctx);
int cmd_diffusion_moments(Context& ctx);
int cmd_killed_asg(Context& ctx);
int cmd_duality(Context& ctx);
int cmd_ldasg(Context& ctx);
int cmd_fearnhead(Context& ctx);
int cmd_ancestral(Context& ctx);
int cmd_phase_diagram(Context& ctx);

}  // namespace lod::cli
