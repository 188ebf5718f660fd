#pragma once

#include <iosfwd>
#include <span>

namespace pcqp::cli {

/// Exit codes of run_cli.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,            // bad flags, unreadable or malformed input
  kIterationLimit = 2,
  kNumericalFailure = 3,
};

/// Entry point of the `pcqp` tool; argv[0] is the program name.
int run_cli(std::span<const char* const> argv, std::ostream& out, std::ostream& err);

}  // namespace pcqp::cli
