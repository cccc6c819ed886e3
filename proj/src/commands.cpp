#include "drivetherm/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "drivetherm/io.hpp"
#include "drivetherm/log.hpp"

namespace drivetherm {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void note(const CommandOptions& opts, const std::string& msg) {
  if (opts.verbose && opts.log) *opts.log << msg << '\n';
}

class Stopwatch {
 public:
  Stopwatch() : wall_(std::chrono::system_clock::now()), start_(std::chrono::steady_clock::now()) {}
  std::chrono::system_clock::time_point started() const { return wall_; }
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::system_clock::time_point wall_;
  std::chrono::steady_clock::time_point start_;
};

json check_entry(double value, double tolerance) {
  return {{"value", value}, {"tolerance", tolerance}, {"passed", std::isfinite(value) && value <= tolerance}};
}

/// Writes the manifest, then every data file stamped with its hash.
RunOutputs write_outputs(const fs::path& out_dir, ManifestInput in,
                         const std::vector<std::pair<std::string, std::function<std::string(const std::string&)>>>& files) {
  fs::create_directories(out_dir);
  for (const auto& f : files) in.outputs.push_back(f.first);
  const json manifest = make_manifest(in);
  const std::string bytes = manifest_bytes(manifest);
  RunOutputs out;
  out.manifest = out_dir / in.config->config.output.manifest;
  out.manifest_hash = sha256_hex(bytes);
  write_text(out.manifest, bytes);
  for (const auto& [name, render] : files) {
    out.data.push_back(out_dir / name);
    write_text(out.data.back(), render(out.manifest_hash));
  }
  for (const auto& [name, entry] : in.diagnostics.items())
    if (entry.is_object() && entry.contains("passed") && !entry["passed"].get<bool>()) out.failed_checks.push_back(name);
  return out;
}

}  // namespace

RunOutputs cmd_simulate(const LoadedConfig& loaded, const fs::path& out_dir, const CommandOptions& opts) {
  const RunConfig& cfg = loaded.config;
  if (cfg.scan) throw ConfigError("simulate: configuration has a scan section; use the scan command");
  const Stopwatch clock;
  const Problem p = make_problem(cfg);
  const GibbsModel model = p.model();
  const TimeGrid grid = p.grid_for(model, p.t_end);
  note(opts, "simulate: " + std::to_string(grid.n_steps()) + " steps to t = " + format_double(grid.t_end()));
  const EvolutionTrace trace = propagate(model, p.V, p.drive, grid, p.propagation);
  const auto rows = qfi_series(trace, p.engine);

  double max_rel = 0.0, max_mixed = 0.0, worst_gain = 0.0;
  for (const auto& r : rows) {
    max_rel = std::max(max_rel, r.rel_disagreement);
    max_mixed = std::max(max_mixed, r.diagnostics.mixed_term_residual);
    worst_gain = std::max({worst_gain, -r.I_t, r.F_eq - r.F_total});
  }
  const auto& tol = cfg.tolerances;
  ManifestInput in;
  in.command = "simulate";
  in.config = &loaded;
  in.started = clock.started();
  in.diagnostics = {{"n_steps", grid.n_steps()},
                    {"dt", grid.dt()},
                    {"beta_derivative", p.drive.beta_derivative_exact() ? "exact" : "finite-difference"},
                    {"dual_path", check_entry(max_rel, tol.rel_disagreement)},
                    {"mixed_term", check_entry(max_mixed, tol.mixed_term)},
                    {"positivity", check_entry(worst_gain, tol.increment_floor)},
                    {"unitarity", check_entry(trace.max_unitarity_defect, tol.unitarity)}};

  std::vector<std::pair<std::string, std::function<std::string(const std::string&)>>> files;
  files.emplace_back(cfg.output.results, [&](const std::string& h) { return results_csv(rows, h); });
  std::optional<CurrentTrace> ct;
  if (!cfg.output.kernel.empty()) {
    ct = build_current_trace(trace, p.engine.fault);
    files.emplace_back(cfg.output.kernel, [&](const std::string& h) { return kernel_csv(*ct, model, h); });
  }
  in.elapsed_seconds = clock.seconds();
  auto out = write_outputs(out_dir, std::move(in), files);
  note(opts, "simulate: wrote " + out.manifest.string());
  return out;
}

RunOutputs cmd_scan(const LoadedConfig& loaded, const fs::path& out_dir, const CommandOptions& opts) {
  const RunConfig& cfg = loaded.config;
  if (!cfg.scan) throw ConfigError("scan: configuration has no scan section");
  const Stopwatch clock;
  ScanSpec spec;
  spec.axis = cfg.scan->axis;
  spec.values = cfg.scan->values;
  spec.fixed = make_problem(cfg);
  spec.reduce = cfg.scan->reduce;
  note(opts, std::string("scan: ") + to_string(spec.axis) + " axis, " + std::to_string(spec.values.size()) + " points");
  ScanResult result = run_scan(spec, {opts.parallelism});
  result.provenance = to_json(cfg).dump();

  double max_rel = 0.0;
  for (const auto& pt : result.points) max_rel = std::max(max_rel, pt.rel_disagreement);
  ManifestInput in;
  in.command = "scan";
  in.config = &loaded;
  in.started = clock.started();
  in.diagnostics = {{"points", result.points.size()},
                    {"dual_path", check_entry(max_rel, cfg.tolerances.rel_disagreement)}};
  in.extra["scan"] = {{"axis", to_string(result.axis)},
                      {"argmax", result.argmax},
                      {"argmax_index", result.argmax_index},
                      {"argmax_F_total", result.points[result.argmax_index].F_total}};
  in.elapsed_seconds = clock.seconds();
  auto out = write_outputs(out_dir, std::move(in),
                           {{cfg.output.results, [&](const std::string& h) { return scan_csv(result, h); }}});
  note(opts, "scan: argmax at " + format_double(result.argmax));
  return out;
}

ValidationReport cmd_validate(const RunConfig& config, const ValidateOptions& opts) {
  return run_validation(config, opts);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"QFI of a thermal probe under a temperature-dependent drive", "drivetherm"};
  app.require_subcommand(1);
  CommandOptions opts;
  opts.log = &err;
  app.add_option("--parallelism", opts.parallelism, "scan worker threads (0 = all hardware threads)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", opts.verbose, "progress messages on stderr");
  app.fallthrough();

  std::string config_path, out_dir, report_path;
  auto* sim = app.add_subcommand("simulate", "time series of the QFI decomposition");
  sim->add_option("--config", config_path, "YAML run configuration")->required();
  sim->add_option("--out", out_dir, "output directory")->required();
  auto* scan = app.add_subcommand("scan", "sweep frequency, temperature or time");
  scan->add_option("--config", config_path, "YAML run configuration")->required();
  scan->add_option("--out", out_dir, "output directory")->required();
  auto* val = app.add_subcommand("validate", "run the invariant suite");
  val->add_option("--config", config_path, "YAML run configuration (built-in default if absent)");
  val->add_option("--report", report_path, "write the machine-readable report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_code::validation_failure;
  }

  const auto previous_sink = log::set_warning_sink([&err](std::string_view m) { err << "warning: " << m << '\n'; });
  struct RestoreSink {
    log::Sink sink;
    ~RestoreSink() { log::set_warning_sink(std::move(sink)); }
  } restore{previous_sink};

  std::optional<LoadedConfig> loaded;
  try {
    const double scale = tolerance_scale_from_env();
    if (!config_path.empty()) loaded = load_config(config_path, scale);
    else {
      loaded = LoadedConfig{default_config(), {}};
      apply_tolerance_scale(loaded->config.tolerances, scale);
    }
    if (scan->parsed() && !loaded->config.scan) throw ConfigError("scan: configuration has no scan section");
    if (sim->parsed() && loaded->config.scan) {
      throw ConfigError("simulate: configuration has a scan section; use the scan command");
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_code::validation_failure;
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_code::validation_failure;
  }

  try {
    if (val->parsed()) {
      const ValidationReport rep = cmd_validate(loaded->config);
      out << rep.table();
      if (!report_path.empty()) write_text(report_path, rep.to_json().dump(2) + "\n");
      if (!rep.all_passed()) {
        for (const auto& name : rep.failures()) err << "failed invariant: " << name << '\n';
        return exit_code::numerical_failure;
      }
      return exit_code::ok;
    }
    const RunOutputs r = sim->parsed() ? cmd_simulate(*loaded, out_dir, opts) : cmd_scan(*loaded, out_dir, opts);
    out << "manifest " << r.manifest.string() << " sha256 " << r.manifest_hash << '\n';
    for (const auto& f : r.data) out << "wrote " << f.string() << '\n';
    if (!r.failed_checks.empty()) {
      for (const auto& name : r.failed_checks) err << "failed check: " << name << '\n';
      return exit_code::numerical_failure;
    }
    return exit_code::ok;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_code::validation_failure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_code::numerical_failure;
  }
}

}  // namespace drivetherm
