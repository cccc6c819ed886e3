#pragma once

// Time-ordered propagation under H(t, beta) = H0 + lambda(t, beta) V.

#include <cstddef>
#include <vector>

#include "drivetherm/drive.hpp"
#include "drivetherm/thermal.hpp"

namespace drivetherm {

/// Uniform grid t_k = k * dt on [0, t_end]. t_end = 0 gives the single node t = 0.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double t_end, std::size_t n_steps);

  /// n_steps = ceil(200 * t_end * fastest_frequency / (2 pi)), at least 1.
  static TimeGrid automatic(double t_end, double fastest_frequency);
  static std::size_t auto_steps(double t_end, double fastest_frequency);

  double t_end() const noexcept { return t_end_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t size() const noexcept { return n_steps_ + 1; }
  double dt() const noexcept { return n_steps_ == 0 ? 0.0 : t_end_ / static_cast<double>(n_steps_); }
  double node(std::size_t k) const;
  /// Index of the node closest to t.
  std::size_t nearest(double t) const;

 private:
  double t_end_ = 0.0;
  std::size_t n_steps_ = 0;
};

/// Largest Bohr frequency of H0, used by the automatic grid rule.
double bohr_bandwidth(const GibbsModel& model);

struct PropagationOptions {
  /// Largest tolerated ||U^dagger U - I||_F at any node.
  double unitarity_tolerance = 1e-8;
};

struct EvolutionTrace {
  TimeGrid grid;
  std::vector<UnitaryOperator> propagators;   // U(t_k)
  std::vector<HermitianOperator> heisenberg_V;  // U^dagger V U at t_k
  /// S_k = int over [t_k, t_{k+1}] of V_H(s) ds, exact for the step
  /// Hamiltonian. One entry per step.
  std::vector<HermitianOperator> step_integrals;
  double beta = 0.0;
  GibbsModel model;
  DriveProfile drive;
  HermitianOperator V;
  double max_unitarity_defect = 0.0;

  std::size_t size() const noexcept { return propagators.size(); }
  /// rho(t_k) = U pi0 U^dagger
  DensityMatrix state_at(std::size_t k) const;
};

/// Midpoint-exponential stepping:
/// U(t_{k+1}) = exp(-i dt H(t_k + dt/2, beta)) U(t_k).
EvolutionTrace propagate(const GibbsModel& model, const HermitianOperator& V, const DriveProfile& drive,
                         const TimeGrid& grid, const PropagationOptions& opts = {});

/// dlambda/dbeta at the midpoint of step k, the weight paired with S_k.
double step_weight(const EvolutionTrace& trace, std::size_t k);

/// Hermitian B(t_k) with A(t_k, beta) = U^dagger dU/dbeta = -i B(t_k), where
/// B(t_k) = sum_{j<k} dlambda/dbeta(t_j + dt/2) S_j. This is the exact beta
/// derivative of the midpoint propagator, not just an approximation to it.
std::vector<HermitianOperator> beta_generator(const EvolutionTrace& trace);

/// d rho / d beta at node k via U (d pi0 + [A, pi0]) U^dagger.
TangentOperator drho_dbeta_analytic(const EvolutionTrace& trace, std::size_t k);

/// Same quantity from a centred difference in beta; both branches are
/// re-thermalized and re-propagated. Non-positive h_beta selects the
/// default 1e-5 * max(1, beta).
TangentOperator drho_dbeta_fd(const GibbsModel& model, const HermitianOperator& V, const DriveProfile& drive,
                              const TimeGrid& grid, std::size_t k, double h_beta = 0.0,
                              const PropagationOptions& opts = {});

double default_beta_step(double beta);

}  // namespace drivetherm
