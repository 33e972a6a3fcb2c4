#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace lipc::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kVerifyFailed = 4 };

/// Environment variable holding the default worker count.
inline constexpr const char* kThreadsEnv = "LIPC_THREADS";

/// LIPC_THREADS if set and valid, else 1.
std::size_t default_threads();

/// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lipc::cli
