#pragma once

// Closed-form results for the driven spin-1/2 probe
// H = (Omega/2) sigma_z + lambda(t, beta) sigma_x, used as oracles.

#include <array>
#include <vector>

#include "drivetherm/drive.hpp"
#include "drivetherm/propagation.hpp"

namespace drivetherm::spin {

using BlochVector = std::array<double, 3>;

struct BlochTrace {
  TimeGrid grid;
  std::vector<BlochVector> a;  // V_H(t_k) = a(t_k) . sigma
  double max_norm_drift = 0.0;
};

/// m = tanh(beta Omega / 2)
double magnetization(double omega, double beta);

/// (Omega/2)^2 sech^2(beta Omega / 2)
double qubit_equilibrium_qfi(double omega, double beta);

struct BlochOptions {
  double norm_tolerance = 1e-6;
  /// RK4 sub-steps per grid interval.
  int substeps = 8;
};

/// Bloch vector of V_H(t) = U^dagger sigma_x U for B(t) = (2 lambda(t), 0, Omega).
/// The full SO(3) frame R obeys dR/dt = [B]_x R with R(0) = I; a(t) is its
/// first row, so a(t) = (cos Omega t, -sin Omega t, 0) at zero drive.
/// Classic RK4 with `substeps` stages per grid interval; the norm is
/// checked, never renormalized.
BlochTrace bloch_precess(double omega, const DriveProfile& drive, double beta, const TimeGrid& grid,
                         const BlochOptions& opts = {});

/// Weak-field symmetrized kernel 4 m^2 cos(Omega (s - u)).
double weak_field_kernel(double omega, double m, double s, double u);

/// Detuned amplitude A(t) for a cosine drive with zero phase. Throws
/// DetuningTooSmall when |omega_d - Omega| <= 1e-6 Omega.
double detuned_amplitude(double omega, double omega_d, double t);

/// 4 m^2 (lambda0 G')^2 A(t), weak-field leading order.
double detuned_increment(double omega, double omega_d, double m, double lambda0, double g_prime, double t);

struct ResonantIncrement {
  /// 4 m^2 (lambda0 G')^2 A_res(t)
  double exact = 0.0;
  /// m^2 (lambda0 G')^2 t^2
  double long_time = 0.0;
};

/// A(t) in the limit omega_d -> Omega.
double resonant_amplitude(double omega, double t);
ResonantIncrement resonant_increment(double omega, double m, double lambda0, double g_prime, double t);

/// Either closed form, chosen by the detuning floor.
double weak_field_increment(double omega, double omega_d, double m, double lambda0, double g_prime, double t);

/// 4 m^2 (lambda0 G')^2, the t^2 coefficient at short times.
double short_time_coefficient(double m, double lambda0, double g_prime);

inline constexpr double kDetuningFloor = 1e-6;

}  // namespace drivetherm::spin
