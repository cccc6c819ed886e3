#pragma once

// The invariant suite behind `drivetherm validate`.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivetherm/config.hpp"

namespace drivetherm {

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::vector<std::string> failures() const;
  std::string table() const;
  nlohmann::json to_json() const;
};

struct ValidateOptions {
  /// Test hook: corrupt the information current to prove checks can fail.
  CurrentFault fault = CurrentFault::none;
};

/// Runs every check on the configuration's model, drive and grid. A scan
/// section, if present, is ignored.
ValidationReport run_validation(const RunConfig& config, const ValidateOptions& opts = {});

}  // namespace drivetherm
