#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lod::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kSuccess = 0,
  kStatisticalFailure = 1,
  kInvalidInput = 2,
  kNoConvergence = 3,
};

/// Runs one invocation; args excludes the program name. Output files go
/// where --out says (stdout when absent); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

/// Parses "a:b:k" (k evenly spaced points from a to b inclusive), a comma
/// separated list, or a single number.
std::vector<double> parse_grid(const std::string& text);

}  // namespace lod::cli
