#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hjr {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad flags or invalid input values
  kExitNumerical = 2, // integration blow-up, non-PD system, removability
  kExitIo = 3,        // unreadable or malformed files
};

/// Runs one `hjr` invocation. args excludes the program name. JSON results
/// go to `out` (tables with --pretty), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hjr
