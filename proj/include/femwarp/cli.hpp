#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace femwarp {

/// Exit codes of the command-line driver.
inline constexpr int exit_success = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_reversed = 2;

/// Run the `femwarp` command line. `args` excludes the program name.
/// Errors are reported on `err` as a single `error: CODE: message` line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace femwarp
