#pragma once

#include <iosfwd>

namespace kne::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Subcommands: walks, train, eval-lp, eval-nc. Returns the process exit code:
// 0 success, 2 usage or configuration error, 1 runtime failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kne::cli
