#pragma once

#include <string>
#include <vector>

namespace gm::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kPass = 0,
  kCheckFailed = 1,
  kUsageError = 2,
  kIoError = 3,
};

inline constexpr const char* kVersion = "1.0.0";

/// Runs the command line (args excludes the program name) and returns the exit code.
int run(const std::vector<std::string>& args);

}  // namespace gm::cli
