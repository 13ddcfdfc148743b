#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace degenwave::cli {

/// Exit codes of `degenwave`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace degenwave::cli
