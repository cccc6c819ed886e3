#pragma once

// Information current J_V, the current-current kernel, the dynamical
// increment I_t and the decomposition F(t) = F_eq + I_t, with the spectral
// QFI of the evolved state as an independent cross-check.

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "drivetherm/propagation.hpp"

namespace drivetherm {

/// Fault injection used by the validation harness to prove that its checks
/// can fail. `commutator_sign` feeds {V_H, pi0} in place of -i[V_H, pi0],
/// so the current becomes 2 V_H and acquires a diagonal part.
enum class CurrentFault { none, commutator_sign };

struct EngineOptions {
  /// Number of repetitions n in the Cramer-Rao bound 1/sqrt(n F).
  std::size_t n_measurements = 1;
  /// Floor for the denominator of rel_disagreement.
  double disagreement_floor = 1e-30;
  CurrentFault fault = CurrentFault::none;
};

/// J_V = -i J^{-1}_{pi0}([V_H, pi0])
HermitianOperator information_current(const GibbsModel& model, const HermitianOperator& VH,
                                      CurrentFault fault = CurrentFault::none);

struct CurrentTrace {
  TimeGrid grid;
  std::vector<HermitianOperator> currents;  // J_V(t_k)
  std::vector<double> weights;              // dlambda/dbeta(t_k, beta)
  /// Current of the step integral S_k, i.e. J_V integrated over step k,
  /// and its midpoint weight. These carry every time integral below.
  std::vector<HermitianOperator> step_currents;
  std::vector<double> step_weights;
  /// step_currents in the eigenbasis of pi0, aligned with
  /// model.populations(); used for O(d^2) kernel evaluation.
  std::vector<MatrixXc> step_currents_pi0_basis;

  std::size_t size() const noexcept { return currents.size(); }
};

CurrentTrace build_current_trace(const EvolutionTrace& trace, CurrentFault fault = CurrentFault::none);

/// K(s, u) = Tr[pi0 J_s J_u]
Complex kernel(const GibbsModel& model, const HermitianOperator& Js, const HermitianOperator& Ju);

struct KernelIncrement {
  /// Double sum with the symmetrized kernel K_S = Re K.
  double symmetric = 0.0;
  /// |contribution of K_A = (K(s,u) - K(u,s))/2|
  double antisymmetric = 0.0;
};

/// Double integral of w(s) w(u) K(s, u) over [0, t_k]^2, as a sum over pairs
/// of steps with step-integrated currents and midpoint weights. O(k^2).
KernelIncrement increment_via_kernel_split(const CurrentTrace& ct, const GibbsModel& model, std::size_t k);
double increment_via_kernel(const CurrentTrace& ct, const GibbsModel& model, std::size_t k);
double increment_via_kernel(const CurrentTrace& ct, const GibbsModel& model);

/// delta L(t_k) = integral of w(s) J_V(s) over [0, t_k], for every k.
std::vector<HermitianOperator> delta_L_series(const CurrentTrace& ct);
HermitianOperator delta_L(const CurrentTrace& ct, std::size_t k);

/// Tr[pi0 delta L^2]
double increment_from_delta_L(const GibbsModel& model, const HermitianOperator& dL);
double increment_via_deltaL(const CurrentTrace& ct, const GibbsModel& model, std::size_t k);
double increment_via_deltaL(const CurrentTrace& ct, const GibbsModel& model);

struct QfiDiagnostics {
  std::size_t n_steps = 0;
  double dt = 0.0;
  double unitarity_drift = 0.0;
  /// |Tr[pi0 L_eq delta L]|
  double mixed_term_residual = 0.0;
};

struct QfiResult {
  double t = 0.0;
  double F_eq = 0.0;
  double I_t = 0.0;
  double F_total = 0.0;
  double F_spectral = 0.0;
  double rel_disagreement = 0.0;
  double crb_sigma = 0.0;
  QfiDiagnostics diagnostics;
};

/// Full decomposition at every node of an existing trace.
std::vector<QfiResult> qfi_series(const EvolutionTrace& trace, const EngineOptions& opts = {});

QfiResult qfi_driven(const GibbsModel& model, const HermitianOperator& V, const DriveProfile& drive,
                     const TimeGrid& grid, std::size_t at, const EngineOptions& opts = {},
                     const PropagationOptions& prop = {});

}  // namespace drivetherm
