#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sparselds::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kRecoveryFailed = 3,
  kSolverError = 4,
};

// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparselds::cli
