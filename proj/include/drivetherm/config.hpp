#pragma once

// Run configuration: YAML input, resolution of automatic defaults, and the
// JSON snapshot stored in run manifests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivetherm/scan.hpp"

namespace drivetherm {

/// (omega / 2) sigma_z
struct QubitSpec {
  double omega = 1.0;
  bool operator==(const QubitSpec&) const = default;
};
/// scale * sigma_axis, axis in {x, y, z}
struct PauliSpec {
  char axis = 'x';
  double scale = 1.0;
  bool operator==(const PauliSpec&) const = default;
};
struct DiagonalSpec {
  std::vector<double> values;
  bool operator==(const DiagonalSpec&) const = default;
};
struct DenseSpec {
  std::vector<std::vector<double>> re;
  std::vector<std::vector<double>> im;
  bool operator==(const DenseSpec&) const = default;
};
using OperatorSpec = std::variant<QubitSpec, PauliSpec, DiagonalSpec, DenseSpec>;

HermitianOperator build_operator(const OperatorSpec& spec);
Index operator_dim(const OperatorSpec& spec);

struct ModelConfig {
  Index dim = 2;
  OperatorSpec H0 = QubitSpec{};
  OperatorSpec V = PauliSpec{};
  double beta_star = 1.0;
  bool operator==(const ModelConfig&) const = default;
};

struct GridConfig {
  double t_end = 0.0;
  /// Empty until resolved by the automatic rule.
  std::optional<std::size_t> n_steps;
  bool operator==(const GridConfig&) const = default;
};

struct ScanConfig {
  ScanAxis axis = ScanAxis::frequency;
  std::vector<double> values;
  Reduction reduce = ValueAtTime{};
  bool operator==(const ScanConfig&) const = default;
};

struct ToleranceConfig {
  double rank_floor = kDefaultRankFloor;
  std::optional<double> beta_max;
  double unitarity = 1e-8;
  double rel_disagreement = 1e-6;
  double mixed_term = 1e-10;
  double increment_floor = 1e-10;
  /// Multiplier applied to the defaults above (DRIVETHERM_TOLERANCE_SCALE).
  double scale = 1.0;
  bool operator==(const ToleranceConfig&) const = default;
};

struct OutputConfig {
  std::string results = "results.csv";
  std::string manifest = "manifest.json";
  /// Optional symmetrized-kernel matrix K_S(s, u) as CSV.
  std::string kernel;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  ModelConfig model;
  DriveProfile drive;
  GridConfig grid;
  std::optional<ScanConfig> scan;
  std::size_t n_measurements = 1;
  OutputConfig output;
  std::optional<std::uint64_t> seed;
  ToleranceConfig tolerances;

  bool operator==(const RunConfig&) const;
};

/// Values the resolver filled in, keyed by dotted path.
using ResolvedDefaults = std::map<std::string, nlohmann::json>;

struct LoadedConfig {
  RunConfig config;
  ResolvedDefaults resolved;
};

/// Parses YAML text. Errors carry the offending line.
LoadedConfig parse_config(const std::string& yaml_text, double tolerance_scale = 1.0);
LoadedConfig load_config(const std::filesystem::path& path, double tolerance_scale = 1.0);

/// Multiplies the default-derived tolerances and records the factor.
void apply_tolerance_scale(ToleranceConfig& tol, double scale);

/// DRIVETHERM_TOLERANCE_SCALE, or 1 when unset. Throws ConfigError on junk.
double tolerance_scale_from_env();

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// Problem for the configuration's beta_star and grid.
Problem make_problem(const RunConfig& config);
GibbsOptions gibbs_options(const RunConfig& config);

/// Built-in resonant spin-1/2 setup used by `validate` without a config.
RunConfig default_config();

}  // namespace drivetherm
