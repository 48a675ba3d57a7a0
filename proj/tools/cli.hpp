#pragma once

#include <string>
#include <vector>

namespace apsolve::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;  // a verification verdict failed
inline constexpr int kExitParse = 2;
inline constexpr int kExitNeverFinite = 3;
inline constexpr int kExitAllShiftsBad = 4;
inline constexpr int kExitSmallDivisor = 5;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args);

}  // namespace apsolve::cli
