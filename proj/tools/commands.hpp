#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curirl::cli {

inline constexpr const char* tool_version = "0.1.0";

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_data = 3;
inline constexpr int exit_numeric = 4;

/// Entry point behind the `curirl` executable; argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace curirl::cli
