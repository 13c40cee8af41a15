#pragma once

#include <chrono>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace restex {

/// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitNotReproducible = 3;

/// Environment variable whose value is sent as a bearer token.
inline constexpr const char* kAuthTokenEnv = "RESTEX_AUTH_TOKEN";

/// "250ms", "30s", "5m", "1h"; a bare number means seconds.
/// Throws std::invalid_argument.
std::chrono::milliseconds parse_duration(std::string_view text);

/// Runs `restex <args...>` (args exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace restex
