#pragma once

#include <iosfwd>

namespace daebvp::cli
{

// Exit codes
inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 1;
inline constexpr int exit_not_regular = 2;
inline constexpr int exit_unsolvable = 3;
inline constexpr int exit_zero_E = 4;
inline constexpr int exit_verification = 5;

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace daebvp::cli
