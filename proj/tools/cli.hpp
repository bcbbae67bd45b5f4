#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wordpost::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int {
    kSuccess = 0,
    kNumericalFailure = 1,
    kUsageError = 2,
};

// Runs one command line (args[0] is the program name). Regular output goes to
// `out`, diagnostics and default run logs to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wordpost::cli
