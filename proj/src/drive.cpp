#include "drivetherm/drive.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

// pchip.hpp in Boost 1.74 calls isnan unqualified.
#include <math.h>
#include <boost/math/interpolators/pchip.hpp>

#include "drivetherm/errors.hpp"

namespace drivetherm {

struct MonotoneCubic::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw DomainError("tabulated profile: abscissa and value counts differ");
  if (x_.size() < 4) throw DomainError("tabulated profile needs at least 4 points");
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw DomainError("tabulated profile abscissae must be strictly increasing");
  }
  auto xs = x_;
  auto ys = y_;
  impl_ = std::make_shared<Impl>(Impl{{std::move(xs), std::move(ys)}});
}

void MonotoneCubic::check_range(double x) const {
  if (!impl_) throw DomainError("empty tabulated profile");
  if (x < x_.front() || x > x_.back()) {
    std::ostringstream os;
    os << "tabulated profile evaluated at " << x << " outside [" << x_.front() << ", " << x_.back() << "]";
    throw ExtrapolationError(os.str());
  }
}

double MonotoneCubic::operator()(double x) const {
  check_range(x);
  return impl_->spline(x);
}

double MonotoneCubic::derivative(double x) const {
  check_range(x);
  return impl_->spline.prime(x);
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double gaussian_log(const GaussianEnvelope& g, double beta) {
  if (!(g.s_beta > 0)) throw DomainError("gaussian envelope needs s_beta > 0");
  const double z = (beta - g.beta0) / g.s_beta;
  return -0.5 * z * z;
}

}  // namespace

double DriveProfile::envelope_at(double beta) const {
  return std::visit(overloaded{
                        [&](const GaussianEnvelope& g) { return std::exp(gaussian_log(g, beta)); },
                        [](const ConstantEnvelope&) { return 1.0; },
                        [&](const TabulatedEnvelope& e) { return e.table(beta); },
                    },
                    envelope);
}

double DriveProfile::envelope_derivative(double beta) const {
  return std::visit(overloaded{
                        [&](const GaussianEnvelope& g) {
                          return -((beta - g.beta0) / (g.s_beta * g.s_beta)) * std::exp(gaussian_log(g, beta));
                        },
                        [](const ConstantEnvelope&) { return 0.0; },
                        [&](const TabulatedEnvelope& e) {
                          const double h = 1e-5 * std::max(1.0, std::abs(beta));
                          // one-sided at the table ends
                          const double lo = std::max(beta - h, e.table.front());
                          const double hi = std::min(beta + h, e.table.back());
                          return (e.table(hi) - e.table(lo)) / (hi - lo);
                        },
                    },
                    envelope);
}

double DriveProfile::modulation_at(double t) const {
  return std::visit(overloaded{
                        [&](const CosineModulation& c) { return std::cos(c.omega_d * t + c.phi); },
                        [](const ConstantModulation&) { return 1.0; },
                        [&](const TabulatedModulation& m) { return m.table(t); },
                    },
                    temporal);
}

bool DriveProfile::beta_derivative_exact() const {
  return !std::holds_alternative<TabulatedEnvelope>(envelope);
}

double DriveProfile::modulation_frequency() const {
  if (const auto* c = std::get_if<CosineModulation>(&temporal)) return std::abs(c->omega_d);
  return 0.0;
}

double lambda_at(const DriveProfile& p, double t, double beta) {
  if (t < 0) throw DomainError("drive evaluated at negative time");
  return p.lambda0 * p.envelope_at(beta) * p.modulation_at(t);
}

double dlambda_dbeta(const DriveProfile& p, double t, double beta) {
  if (t < 0) throw DomainError("drive evaluated at negative time");
  if (std::holds_alternative<ConstantEnvelope>(p.envelope)) return 0.0;
  return p.lambda0 * p.envelope_derivative(beta) * p.modulation_at(t);
}

double cramer_rao_width(double equilibrium_qfi) {
  if (!(equilibrium_qfi > 0)) throw DomainError("equilibrium QFI must be positive");
  return 1.0 / std::sqrt(equilibrium_qfi);
}

double sample_envelope_center(double beta_star, double equilibrium_qfi, std::uint64_t seed) {
  const double half = cramer_rao_width(equilibrium_qfi);
  const double lo = std::max(0.0, beta_star - half);
  const double hi = beta_star + half;
  std::mt19937_64 rng(seed);
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace drivetherm
