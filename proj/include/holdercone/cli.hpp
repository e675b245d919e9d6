#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holdercone {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInfinite = 2;
inline constexpr int kExitFailures = 3;

/// Runs one command line (args[0] is the program name) with the
/// subcommands analyze, decay, certify and suite. Returns the exit status:
/// 0 success, 1 usage or input error, 2 infinite seminorm or norm,
/// 3 failed verification.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holdercone
