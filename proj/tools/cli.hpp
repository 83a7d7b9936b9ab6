#pragma once

#include <string>
#include <vector>

namespace hpsurf::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kInfeasibleFit = 3,
  kEmptyRegion = 4,
  kNumericFailure = 5,
};

/// Runs one command line (args[0] is the program name). Diagnostics go to
/// stderr; primary output to --output or stdout.
int run(const std::vector<std::string>& args);

}  // namespace hpsurf::cli
