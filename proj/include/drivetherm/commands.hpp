#pragma once

// The three CLI commands and the argv entry point.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "drivetherm/config.hpp"
#include "drivetherm/validate.hpp"

namespace drivetherm {

struct CommandOptions {
  /// Scan workers; 0 uses every available hardware thread.
  unsigned parallelism = 0;
  bool verbose = false;
  std::ostream* log = nullptr;
};

struct RunOutputs {
  std::filesystem::path manifest;
  std::string manifest_hash;
  std::vector<std::filesystem::path> data;
  /// Names of checks whose tolerance was exceeded; files are still written.
  std::vector<std::string> failed_checks;
};

RunOutputs cmd_simulate(const LoadedConfig& config, const std::filesystem::path& out_dir,
                        const CommandOptions& opts = {});
RunOutputs cmd_scan(const LoadedConfig& config, const std::filesystem::path& out_dir, const CommandOptions& opts = {});
ValidationReport cmd_validate(const RunConfig& config, const ValidateOptions& opts = {});

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int numerical_failure = 1;
inline constexpr int validation_failure = 2;
}  // namespace exit_code

/// Parses argv, runs the command and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace drivetherm
