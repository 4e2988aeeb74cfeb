#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dsps::cli {

/// Exit codes of the `dsps` tool.
enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kInfeasible = 2,
  kDegenerateDraws = 3,
  kSolverFailure = 4,
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dsps::cli
