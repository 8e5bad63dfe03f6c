#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vfgrad::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kSolverFailure = 2,
  kCheckFailed = 3,  // certification or verification below threshold
};

/// Runs one command. args excludes the program name. Results go to `out`
/// (or the --output file); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vfgrad::cli
