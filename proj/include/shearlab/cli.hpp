#pragma once

// Experiment runner behind the `shearlab` executable.
//
//   shearlab <subcommand> --config <path> --out <path> [--seed <u64>] [--format csv|json]
//
// Exit codes: 0 success, 1 a verified property failed, 2 usage or schema error
// (nothing is written in that case).

#include <iosfwd>
#include <string>
#include <vector>

namespace shearlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailed = 1;
inline constexpr int kExitUsage = 2;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace shearlab::cli
