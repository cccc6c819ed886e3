#pragma once

// Parameter sweeps over driving frequency, temperature or time, and a
// derivative-free maximizer of the QFI over the drive parameters.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "drivetherm/qfi_engine.hpp"

namespace drivetherm {

/// Everything needed to evaluate the QFI at one point.
struct Problem {
  HermitianOperator H0;
  HermitianOperator V;
  double beta = 1.0;
  DriveProfile drive;
  double t_end = 0.0;
  /// Empty selects the automatic 200-steps-per-period rule.
  std::optional<std::size_t> n_steps;
  GibbsOptions gibbs;
  EngineOptions engine;
  PropagationOptions propagation;

  GibbsModel model() const { return make_gibbs(H0, beta, gibbs); }
  TimeGrid grid_for(const GibbsModel& model, double t_end) const;
};

enum class ScanAxis { frequency, temperature, time };

const char* to_string(ScanAxis axis);

struct ValueAtTime {
  double t = 0.0;
  bool operator==(const ValueAtTime&) const = default;
};
/// Maximum of F_total over t in [0, t_window].
struct MaxOverTime {
  double t_window = 0.0;
  bool operator==(const MaxOverTime&) const = default;
};
using Reduction = std::variant<ValueAtTime, MaxOverTime>;

struct ScanSpec {
  ScanAxis axis = ScanAxis::frequency;
  std::vector<double> values;
  Problem fixed;
  Reduction reduce = ValueAtTime{};
};

struct ScanPoint {
  double axis_value = 0.0;
  /// Time at which the reduced value was taken.
  double t = 0.0;
  double F_eq = 0.0;
  double I_t = 0.0;
  double F_total = 0.0;
  double F_spectral = 0.0;
  double rel_disagreement = 0.0;
};

struct ScanResult {
  ScanAxis axis = ScanAxis::frequency;
  std::vector<ScanPoint> points;
  double argmax = 0.0;
  std::size_t argmax_index = 0;
  /// Serialized configuration snapshot, filled in by the caller.
  std::string provenance;
};

struct ScanOptions {
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned parallelism = 1;
};

/// Reduces one problem to a scan point, applying the reduction rule.
ScanPoint evaluate_point(const Problem& problem, const Reduction& reduce, double axis_value);

ScanResult run_scan(const ScanSpec& spec, const ScanOptions& opts = {});
ScanResult frequency_scan(const ScanSpec& spec, const ScanOptions& opts = {});
ScanResult temperature_scan(const ScanSpec& spec, const ScanOptions& opts = {});

/// First index of the largest F_total (ties resolve to the smallest axis value).
std::size_t argmax_index(const std::vector<ScanPoint>& points);

struct DriveParameters {
  double omega_d = 1.0;
  double beta0 = 0.0;
  double s_beta = 1.0;
  double lambda0 = 0.1;

  static constexpr std::size_t size = 4;
  double& operator[](std::size_t i);
  double operator[](std::size_t i) const;
  bool operator==(const DriveParameters&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool collapsed() const { return hi <= lo; }
};

struct OptimizeSpec {
  /// Model, drive temporal part and resolution; its beta is replaced by target_beta.
  Problem base;
  double target_beta = 1.0;
  double t_eval = 1.0;
  /// Bounds on (omega_d, beta0, s_beta, lambda0), same order as DriveParameters.
  std::array<Interval, DriveParameters::size> bounds;
  std::size_t coarse_points = 21;
  std::size_t golden_iterations = 30;
  std::size_t passes = 2;
  std::size_t budget = 2000;
  /// Seed omega_d at the Bohr bandwidth and beta0 at target - s_beta.
  bool analytic_seed = false;
  /// Largest lambda0 / bandwidth accepted when analytic seeding is on.
  double weak_field_cap = 0.1;
};

struct OptimizeStep {
  DriveParameters params;
  double F_eq = 0.0;
  double I_t = 0.0;
  double F_total = 0.0;
  double F_spectral = 0.0;
};

struct OptimizeResult {
  DriveParameters best;
  double best_F_total = 0.0;
  bool budget_exhausted = false;
  std::vector<OptimizeStep> trail;
};

/// Coordinate-wise coarse grid plus golden-section refinement. Deterministic.
OptimizeResult optimize_drive(const OptimizeSpec& spec);

}  // namespace drivetherm
