#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace muellerkit::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kUsageOrIo = 1,
  kFindings = 2,
  kContractViolation = 3,
};

/// Runs the command line `args` (args[0] is the program name). Machine-readable
/// results go to `out`, progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace muellerkit::cli
