#pragma once

// Control law lambda(t, beta) = lambda0 * G(beta) * f(t).

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace drivetherm {

/// Monotone (PCHIP) cubic through strictly increasing abscissae. Evaluation
/// outside [front, back] throws ExtrapolationError.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  const std::vector<double>& abscissae() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  void check_range(double x) const;

  std::vector<double> x_, y_;
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

struct GaussianEnvelope {
  double beta0 = 0.0;
  double s_beta = 1.0;
};
struct ConstantEnvelope {};
struct TabulatedEnvelope {
  MonotoneCubic table;
};
using Envelope = std::variant<GaussianEnvelope, ConstantEnvelope, TabulatedEnvelope>;

struct CosineModulation {
  double omega_d = 1.0;
  double phi = 0.0;
};
struct ConstantModulation {};
struct TabulatedModulation {
  MonotoneCubic table;
};
using Modulation = std::variant<CosineModulation, ConstantModulation, TabulatedModulation>;

struct DriveProfile {
  double lambda0 = 0.1;
  Envelope envelope = GaussianEnvelope{};
  Modulation temporal = CosineModulation{};

  /// G(beta), dimensionless.
  double envelope_at(double beta) const;
  /// G'(beta). Tabulated envelopes use a centered difference.
  double envelope_derivative(double beta) const;
  /// f(t)
  double modulation_at(double t) const;
  /// False for tabulated envelopes, whose beta-derivative is a finite difference.
  bool beta_derivative_exact() const;
  /// Fastest angular frequency in f(t); 0 for constant or tabulated forms.
  double modulation_frequency() const;
};

double lambda_at(const DriveProfile& p, double t, double beta);
double dlambda_dbeta(const DriveProfile& p, double t, double beta);

/// Uniform draw of the envelope centre from
/// [max(0, beta_star - 1/sqrt(F_eq)), beta_star + 1/sqrt(F_eq)].
double sample_envelope_center(double beta_star, double equilibrium_qfi, std::uint64_t seed);

/// Envelope width 1/sqrt(F_eq) that saturates the equilibrium Cramer-Rao bound.
double cramer_rao_width(double equilibrium_qfi);

}  // namespace drivetherm
