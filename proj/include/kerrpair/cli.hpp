#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kerrpair::cli {

// Exit codes: 0 success, 1 configuration or domain error, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

// args excludes the program name.
[[nodiscard]] int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

[[nodiscard]] std::vector<std::string> subcommands();

}  // namespace kerrpair::cli
