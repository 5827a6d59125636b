#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vinfo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;  // validation/configuration failure or a failed report row
inline constexpr int kExitUsage = 2;  // unknown subcommand or flag

// Runs the command line (args exclude the program name). Reports go to files under
// the output directory; a one-line result summary goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vinfo
