#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace taxisfv::cli {

enum ExitCode : int {
    kSuccess = 0,
    kOtherError = 1,
    kConfigError = 2,
    kNumericalFailure = 3,
    kNonConvergence = 4,
};

/// Runs the command line `args` (args[0] is the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace taxisfv::cli
