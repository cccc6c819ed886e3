#include "drivetherm/io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

namespace drivetherm {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols{"t", "F_eq", "I_t", "F_total", "F_spectral", "rel_disagreement", "crb_sigma"};
  return cols;
}

const std::vector<std::string>& scan_columns() {
  static const std::vector<std::string> cols{"axis_value", "t",          "F_eq",           "I_t",
                                             "F_total",    "F_spectral", "rel_disagreement"};
  return cols;
}

namespace {

void header(std::ostringstream& os, const std::string& hash, const std::vector<std::string>& cols) {
  os << "# manifest-sha256: " << hash << '\n';
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void row(std::ostringstream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    os << (first ? "" : ",") << format_double(v);
    first = false;
  }
  os << '\n';
}

}  // namespace

std::string results_csv(const std::vector<QfiResult>& rows, const std::string& manifest_hash) {
  std::ostringstream os;
  header(os, manifest_hash, result_columns());
  for (const auto& r : rows) row(os, {r.t, r.F_eq, r.I_t, r.F_total, r.F_spectral, r.rel_disagreement, r.crb_sigma});
  return os.str();
}

std::string scan_csv(const ScanResult& scan, const std::string& manifest_hash) {
  std::ostringstream os;
  header(os, manifest_hash, scan_columns());
  for (const auto& p : scan.points) row(os, {p.axis_value, p.t, p.F_eq, p.I_t, p.F_total, p.F_spectral, p.rel_disagreement});
  return os.str();
}

std::string kernel_csv(const CurrentTrace& ct, const GibbsModel& model, const std::string& manifest_hash) {
  std::ostringstream os;
  os << "# manifest-sha256: " << manifest_hash << '\n';
  os << "t";
  for (std::size_t j = 0; j < ct.size(); ++j) os << ",K_S@" << format_double(ct.grid.node(j));
  os << '\n';
  for (std::size_t i = 0; i < ct.size(); ++i) {
    os << format_double(ct.grid.node(i));
    for (std::size_t j = 0; j < ct.size(); ++j)
      os << ',' << format_double(kernel(model, ct.currents[i], ct.currents[j]).real());
    os << '\n';
  }
  return os.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# manifest-sha256: ";
      if (line.rfind(key, 0) == 0) t.manifest_hash = line.substr(key.size());
      continue;
    }
    if (t.columns.empty()) {
      t.columns = split(line);
      continue;
    }
    std::vector<double> r;
    for (const auto& cell : split(line)) r.push_back(std::stod(cell));
    if (r.size() != t.columns.size()) throw Error("CSV row width differs from header");
    t.rows.push_back(std::move(r));
  }
  if (t.manifest_hash.empty()) throw Error("CSV has no manifest-sha256 line");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

json make_manifest(const ManifestInput& in) {
  if (!in.config) throw DomainError("manifest needs a configuration");
  json m;
  m["artifact"] = "drivetherm";
  m["version"] = kArtifactVersion;
  m["command"] = in.command;
  m["config"] = to_json(in.config->config);
  json resolved = json::object();
  for (const auto& [key, value] : in.config->resolved) resolved[key] = value;
  m["resolved_defaults"] = resolved;
  m["tolerance_scale"] = in.config->config.tolerances.scale;
  const std::time_t started = std::chrono::system_clock::to_time_t(in.started);
  std::tm utc{};
  gmtime_r(&started, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  m["wall_clock"] = {{"started_utc", stamp}, {"elapsed_seconds", in.elapsed_seconds}};
  m["diagnostics"] = in.diagnostics;
  m["outputs"] = in.outputs;
  for (const auto& [key, value] : in.extra.items()) m[key] = value;
  return m;
}

std::string manifest_bytes(const json& manifest) { return manifest.dump(2) + "\n"; }

RunConfig config_from_manifest(const std::filesystem::path& path) {
  const json m = json::parse(read_text(path));
  return config_from_json(m.at("config"));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write to " + path.string() + " failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace drivetherm
