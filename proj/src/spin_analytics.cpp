#include "drivetherm/spin_analytics.hpp"

#include <cmath>
#include <sstream>

#include "drivetherm/errors.hpp"

namespace drivetherm::spin {

double magnetization(double omega, double beta) { return std::tanh(0.5 * beta * omega); }

double qubit_equilibrium_qfi(double omega, double beta) {
  if (!(omega > 0)) throw DomainError("Omega must be positive");
  if (!(beta >= 0)) throw DomainError("beta must be >= 0");
  const double x = 0.5 * beta * omega;
  // sech via exp(-x) keeps large x finite
  const double e = std::exp(-x);
  const double sech = 2.0 * e / (1.0 + e * e);
  return 0.25 * omega * omega * sech * sech;
}

namespace {

using Frame = Eigen::Matrix3d;

Frame frame_rate(const Frame& r, double bx, double by, double bz) {
  Frame cross;
  cross << 0.0, -bz, by, bz, 0.0, -bx, -by, bx, 0.0;
  return cross * r;
}

}  // namespace

BlochTrace bloch_precess(double omega, const DriveProfile& drive, double beta, const TimeGrid& grid,
                         const BlochOptions& opts) {
  BlochTrace out;
  out.grid = grid;
  out.a.reserve(grid.size());
  if (opts.substeps < 1) throw DomainError("substeps must be >= 1");
  const double dt = grid.dt() / opts.substeps;
  auto field_x = [&](double t) { return 2.0 * lambda_at(drive, t, beta); };

  Frame r = Frame::Identity();
  out.a.push_back({1.0, 0.0, 0.0});
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    for (int sub = 0; sub < opts.substeps; ++sub) {
      const double t = grid.node(k) + sub * dt;
      const Frame k1 = frame_rate(r, field_x(t), 0.0, omega);
      const Frame k2 = frame_rate(r + 0.5 * dt * k1, field_x(t + 0.5 * dt), 0.0, omega);
      const Frame k3 = frame_rate(r + 0.5 * dt * k2, field_x(t + 0.5 * dt), 0.0, omega);
      const Frame k4 = frame_rate(r + dt * k3, field_x(t + dt), 0.0, omega);
      r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    const BlochVector a{r(0, 0), r(0, 1), r(0, 2)};
    const double drift = std::abs(std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]) - 1.0);
    out.max_norm_drift = std::max(out.max_norm_drift, drift);
    if (drift > opts.norm_tolerance) {
      std::ostringstream os;
      os << "Bloch vector norm drift " << drift << " at t = " << grid.node(k + 1);
      throw StepSizeTooCoarse(os.str(), 2 * grid.n_steps());
    }
    out.a.push_back(a);
  }
  return out;
}

double weak_field_kernel(double omega, double m, double s, double u) {
  return 4.0 * m * m * std::cos(omega * (s - u));
}

double detuned_amplitude(double omega, double omega_d, double t) {
  if (std::abs(omega_d - omega) <= kDetuningFloor * std::abs(omega)) {
    throw DetuningTooSmall("detuning below floor; use the resonant form");
  }
  const double swd = std::sin(omega_d * t), cwd = std::cos(omega_d * t);
  const double so = std::sin(omega * t), co = std::cos(omega * t);
  const double c = omega_d * swd * co - omega * cwd * so;
  const double s = omega_d * swd * so + omega * cwd * co - omega;
  const double den = omega_d * omega_d - omega * omega;
  return (c * c + s * s) / (den * den);
}

double detuned_increment(double omega, double omega_d, double m, double lambda0, double g_prime, double t) {
  return short_time_coefficient(m, lambda0, g_prime) * detuned_amplitude(omega, omega_d, t);
}

double resonant_amplitude(double omega, double t) {
  const double x = omega * t;
  return (2.0 * x * x + 2.0 * x * std::sin(2.0 * x) - std::cos(2.0 * x) + 1.0) / (8.0 * omega * omega);
}

ResonantIncrement resonant_increment(double omega, double m, double lambda0, double g_prime, double t) {
  const double c = lambda0 * g_prime;
  return {4.0 * m * m * c * c * resonant_amplitude(omega, t), m * m * c * c * t * t};
}

double weak_field_increment(double omega, double omega_d, double m, double lambda0, double g_prime, double t) {
  if (std::abs(omega_d - omega) <= kDetuningFloor * std::abs(omega)) {
    return resonant_increment(omega, m, lambda0, g_prime, t).exact;
  }
  return detuned_increment(omega, omega_d, m, lambda0, g_prime, t);
}

double short_time_coefficient(double m, double lambda0, double g_prime) {
  const double c = lambda0 * g_prime;
  return 4.0 * m * m * c * c;
}

}  // namespace drivetherm::spin
