#pragma once

#include <ostream>
#include <span>

namespace psd::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kConditionFailed = 1;
inline constexpr int kInputError = 2;
inline constexpr int kPreconditionError = 3;

// Parses argv (without the program name at index 0 removed) and runs one
// subcommand: scan, check, deform or selfcheck.
int run(std::span<const char* const> argv, std::ostream& out, std::ostream& err);

}  // namespace psd::cli
