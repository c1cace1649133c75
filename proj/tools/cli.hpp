#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace commonlines::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // Invalid/Degenerate verdict or failed operation
inline constexpr int kExitUsage = 2;   // bad arguments, malformed input, I/O
inline constexpr int kExitRetries = 3; // genericity retries exhausted

/// Environment variable naming a default JSON config file.
inline constexpr const char* kConfigEnv = "CLINES_CONFIG";

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace commonlines::cli
