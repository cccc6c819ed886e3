#pragma once

// Result files and run manifests. Every data file starts with a comment line
// carrying the SHA-256 of the manifest it belongs to.

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivetherm/config.hpp"

namespace drivetherm {

inline constexpr const char* kArtifactVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);

/// 17 significant digits, so every double reads back exactly.
std::string format_double(double x);

const std::vector<std::string>& result_columns();
const std::vector<std::string>& scan_columns();

std::string results_csv(const std::vector<QfiResult>& rows, const std::string& manifest_hash);
std::string scan_csv(const ScanResult& scan, const std::string& manifest_hash);
/// Symmetrized kernel K_S(t_i, t_j) on the grid, one row per t_i.
std::string kernel_csv(const CurrentTrace& ct, const GibbsModel& model, const std::string& manifest_hash);

struct CsvTable {
  std::string manifest_hash;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

struct ManifestInput {
  std::string command;
  const LoadedConfig* config = nullptr;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::vector<std::string> outputs;
  std::chrono::system_clock::time_point started;
  double elapsed_seconds = 0.0;
  nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json make_manifest(const ManifestInput& in);
/// Serialized bytes of a manifest, as written and hashed.
std::string manifest_bytes(const nlohmann::json& manifest);

/// Reads a manifest file and rebuilds its RunConfig.
RunConfig config_from_manifest(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace drivetherm
