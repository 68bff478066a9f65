#pragma once

/// @file cli.hpp
/// @brief Entry point of the mixedgreen command line, callable from tests.

#include <iosfwd>
#include <string>
#include <vector>

namespace mixedgreen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNumericalFailure = 3;

/// args[0] is the program name. Diagnostics go to `err` as one JSON line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mixedgreen::cli
