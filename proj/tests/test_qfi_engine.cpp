#include <doctest.h>

#include <cmath>
#include <numbers>

#include "drivetherm/qfi_engine.hpp"
#include "drivetherm/spin_analytics.hpp"
#include "oracles.hpp"
#include "random_suite.hpp"

using namespace drivetherm;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

HermitianOperator qubit_h0() { return HermitianOperator(0.5 * pauli::z().matrix()); }

DriveProfile drive(double beta0, double s_beta, double lambda0, double omega_d = 1.0) {
  DriveProfile p;
  p.lambda0 = lambda0;
  p.envelope = GaussianEnvelope{beta0, s_beta};
  p.temporal = CosineModulation{omega_d, 0.0};
  return p;
}

std::vector<QfiResult> qubit_series(double beta, const DriveProfile& p, double t_end, const HermitianOperator& v = pauli::x()) {
  const auto m = make_gibbs(qubit_h0(), beta);
  return qfi_series(propagate(m, v, p, TimeGrid::automatic(t_end, std::max(1.0, p.modulation_frequency()))));
}

}  // namespace

TEST_SUITE("qfi-engine") {

TEST_CASE("information current examples") {
  const auto m = make_gibbs(qubit_h0(), 2.0);
  CHECK(information_current(m, pauli::z()).matrix().norm() == 0.0);

  std::mt19937_64 rng(51);
  std::normal_distribution<double> n(0.0, 1.0);
  const double mag = std::tanh(1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double ax = n(rng), ay = n(rng), az = n(rng);
    const MatrixXc vh = ax * oracle::pauli_x() + ay * oracle::pauli_y() + az * oracle::pauli_z();
    const MatrixXc expect = 2.0 * mag * (ax * oracle::pauli_y() - ay * oracle::pauli_x());
    CHECK((information_current(m, HermitianOperator(vh)).matrix() - expect).norm() < 1e-13);
  }

  const auto hot = make_gibbs(HermitianOperator(oracle::random_hermitian(rng, 3)), 0.0);
  CHECK(information_current(hot, HermitianOperator(oracle::random_hermitian(rng, 3))).matrix().norm() < 1e-15);
}

TEST_CASE("currents are off-diagonal in the Gibbs eigenbasis") {
  std::mt19937_64 rng(52);
  for (int rep = 0; rep < 10; ++rep) {
    const auto c = suite::random_case(rng);
    const auto m = make_gibbs(c.H0, c.beta);
    const auto tr = propagate(m, c.V, c.drive, TimeGrid::automatic(c.t_end, bohr_bandwidth(m)));
    const auto ct = build_current_trace(tr);
    for (const auto& j : ct.currents) {
      CHECK(std::abs(m.state.expectation(j.matrix())) < 1e-10);
      const MatrixXc jb = m.state.spectrum().to_eigenbasis(j.matrix());
      CHECK(jb.diagonal().norm() < 1e-10);
    }
  }
}

TEST_CASE("current trace weights") {
  const auto m = make_gibbs(qubit_h0(), 3.0);
  DriveProfile c = drive(5, 3, 0.1);
  c.envelope = ConstantEnvelope{};
  const auto ct = build_current_trace(propagate(m, pauli::x(), c, TimeGrid(5.0, 100)));
  for (double w : ct.weights) CHECK(w == 0.0);
  for (double w : ct.step_weights) CHECK(w == 0.0);

  const auto single = build_current_trace(propagate(m, pauli::x(), drive(5, 3, 0.1), TimeGrid(0.0, 0)));
  CHECK(single.size() == 1);
  CHECK(single.step_currents.empty());
}

TEST_CASE("weak-field currents follow the interaction picture") {
  const double beta = 5.0;
  const auto m = make_gibbs(qubit_h0(), beta);
  DriveProfile p = drive(10, 3, 0.1);
  p.lambda0 = 0.0;
  const TimeGrid g = TimeGrid::automatic(2 * kTwoPi, 1.0);
  const auto ct = build_current_trace(propagate(m, pauli::x(), p, g));
  const double mag = spin::magnetization(1.0, beta);
  for (std::size_t k = 0; k < ct.size(); k += 17) {
    const double t = g.node(k);
    // a(t) = (cos t, -sin t, 0)
    const MatrixXc expect = 2.0 * mag * (std::cos(t) * oracle::pauli_y() + std::sin(t) * oracle::pauli_x());
    CHECK((ct.currents[k].matrix() - expect).norm() < 1e-12);
  }
}

TEST_CASE("kernel symmetry and positivity") {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 50; ++rep) {
    const Index d = 2 + rep % 3;
    const auto m = make_gibbs(HermitianOperator(oracle::random_hermitian(rng, d)), 1.3);
    const auto js = information_current(m, HermitianOperator(oracle::random_hermitian(rng, d)));
    const auto ju = information_current(m, HermitianOperator(oracle::random_hermitian(rng, d)));
    CHECK(std::abs(kernel(m, ju, js) - std::conj(kernel(m, js, ju))) < 1e-13);
    const Complex kk = kernel(m, js, js);
    CHECK(std::abs(kk.imag()) < 1e-14);
    CHECK(kk.real() >= 0.0);
    CHECK(kernel(m, js, HermitianOperator::zero(d)) == Complex(0.0));
  }
}

TEST_CASE("symmetrized kernel at vanishing field") {
  const double beta = 5.0, lambda0 = 1e-4;
  const auto m = make_gibbs(qubit_h0(), beta);
  const TimeGrid g = TimeGrid::automatic(2 * kTwoPi, 1.0);
  const auto ct = build_current_trace(propagate(m, pauli::x(), drive(10, 3, lambda0), g));
  const double mag = spin::magnetization(1.0, beta);
  double worst = 0.0;
  const std::size_t stride = g.n_steps() / 49;
  for (std::size_t i = 0; i < ct.size(); i += stride)
    for (std::size_t j = 0; j < ct.size(); j += stride) {
      const double ks = kernel(m, ct.currents[i], ct.currents[j]).real();
      worst = std::max(worst, std::abs(ks - spin::weak_field_kernel(1.0, mag, g.node(i), g.node(j))));
    }
  CHECK(worst <= 10 * lambda0);
  CHECK(worst < 1e-2 * 4 * mag * mag);
}

TEST_CASE("kernel and delta L paths agree and the antisymmetric part drops out") {
  std::mt19937_64 rng(54);
  for (int rep = 0; rep < 10; ++rep) {
    const auto c = suite::random_case(rng);
    const auto m = make_gibbs(c.H0, c.beta);
    const auto ct = build_current_trace(propagate(m, c.V, c.drive, TimeGrid::automatic(c.t_end, bohr_bandwidth(m))));
    const double via_kernel = increment_via_kernel(ct, m);
    const double via_dl = increment_via_deltaL(ct, m);
    CHECK(std::abs(via_kernel - via_dl) <= 1e-10 * std::max(via_dl, 1e-300));
    const auto split = increment_via_kernel_split(ct, m, ct.size() - 1);
    CHECK(split.antisymmetric <= 1e-10 * std::max(split.symmetric, 1e-300));
    // the pi0-orthogonality of delta L to L_eq
    const MatrixXc leq = equilibrium_sld(m).matrix();
    const MatrixXc dl = delta_L(ct, ct.size() - 1).matrix();
    CHECK(std::abs(m.state.expectation(leq * dl)) <= 1e-10);
    CHECK(increment_from_delta_L(m, delta_L(ct, ct.size() - 1)) == doctest::Approx(via_dl).epsilon(1e-13));
  }
}

TEST_CASE("delta L series accumulates step by step") {
  const auto m = make_gibbs(qubit_h0(), 2.0);
  const auto ct = build_current_trace(propagate(m, pauli::x(), drive(4, 2, 0.2), TimeGrid(6.0, 300)));
  const auto series = delta_L_series(ct);
  REQUIRE(series.size() == ct.size());
  CHECK(series.front().matrix().norm() == 0.0);
  MatrixXc acc = MatrixXc::Zero(2, 2);
  for (std::size_t k = 0; k + 1 < ct.size(); ++k) acc += ct.step_weights[k] * ct.step_currents[k].matrix();
  CHECK((series.back().matrix() - acc).norm() < 1e-14);
  CHECK((delta_L(ct, 150).matrix() - series[150].matrix()).norm() == 0.0);
}

TEST_CASE("no-go: beta-independent drive and commuting perturbation") {
  DriveProfile c = drive(5, 3, 0.3);
  c.envelope = ConstantEnvelope{};
  for (const auto& r : qubit_series(2.0, c, 20 * kTwoPi)) {
    CHECK(r.I_t == 0.0);
    CHECK(std::abs(r.F_spectral - r.F_eq) <= 1e-9);
  }
  for (const auto& r : qubit_series(2.0, drive(5, 3, 0.3), 5 * kTwoPi, pauli::z())) CHECK(r.I_t <= 1e-12);

  std::mt19937_64 rng(55);
  const auto h = HermitianOperator(oracle::random_hermitian(rng, 3));
  const auto m = make_gibbs(h, 1.0);
  const auto ct = build_current_trace(propagate(m, h, drive(3, 1, 0.2, 2.0), TimeGrid(10.0, 500)));
  CHECK(increment_via_kernel(ct, m) <= 1e-12);
  CHECK(increment_via_deltaL(ct, m) <= 1e-12);
}

TEST_CASE("short-time quadratic law") {
  const double beta = 5.0, lambda0 = 0.1, t = 1e-3;
  const DriveProfile p = drive(10, 3, lambda0);
  const auto m = make_gibbs(qubit_h0(), beta);
  const auto r = qfi_driven(m, pauli::x(), p, TimeGrid(t, 1), 1);
  const double coef = spin::short_time_coefficient(spin::magnetization(1.0, beta), lambda0, p.envelope_derivative(beta));
  CHECK(std::abs(r.I_t / (t * t) - coef) <= 1e-3 * coef);
}

TEST_CASE("t = 0 and the resonant setup agree with the spectral path") {
  const double beta = 2.0;
  const auto m = make_gibbs(qubit_h0(), beta);
  const auto r0 = qfi_driven(m, pauli::x(), drive(3, 1, 0.1), TimeGrid(0.0, 0), 0);
  CHECK(r0.I_t == 0.0);
  CHECK(r0.F_total == r0.F_eq);
  CHECK(r0.F_spectral == doctest::Approx(r0.F_eq).epsilon(1e-13));

  const double s = cramer_rao_width(equilibrium_qfi(m));
  const auto rows = qubit_series(beta, drive(3, s, 0.1), 10 * kTwoPi);
  for (const auto& r : rows) {
    CHECK(r.rel_disagreement <= 1e-6);
    CHECK(r.F_total == r.F_eq + r.I_t);
    CHECK(r.crb_sigma == doctest::Approx(1.0 / std::sqrt(r.F_total)));
  }
  CHECK(rows.back().I_t > rows.back().F_eq);
}

TEST_CASE("crb width uses the measurement count") {
  const auto m = make_gibbs(qubit_h0(), 1.0);
  EngineOptions o;
  o.n_measurements = 100;
  const auto r = qfi_driven(m, pauli::x(), drive(3, 1, 0.1), TimeGrid(2.0, 100), 100, o);
  CHECK(r.crb_sigma == doctest::Approx(1.0 / std::sqrt(100 * r.F_total)));
}

TEST_CASE("randomized suite: positivity, gain, mixed term, dual paths") {
  std::mt19937_64 rng(20240);
  double max_rel = 0.0, min_inc = 0.0, min_gain = 0.0, max_mixed = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto s = suite::run_case(suite::random_case(rng));
    max_rel = std::max(max_rel, s.max_rel);
    min_inc = std::min(min_inc, s.min_increment);
    min_gain = std::min(min_gain, s.min_gain);
    max_mixed = std::max(max_mixed, s.max_mixed);
  }
  CHECK(max_rel <= 1e-6);
  CHECK(min_inc >= -1e-10);
  CHECK(min_gain >= -1e-10);
  CHECK(max_mixed <= 1e-10);
}

TEST_CASE("dual paths tighten under refinement") {
  std::mt19937_64 rng(20240);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) worst = std::max(worst, suite::run_case(suite::random_case(rng), 4).max_rel);
  CHECK(worst <= 1e-8);
}

TEST_CASE("fault hook breaks the mixed term") {
  const auto m = make_gibbs(qubit_h0(), 2.0);
  const auto tr = propagate(m, pauli::x(), drive(3, 1, 0.1), TimeGrid(5.0, 200));
  EngineOptions o;
  o.fault = CurrentFault::commutator_sign;
  CHECK(qfi_series(tr, o).back().diagnostics.mixed_term_residual > 1e-6);
  CHECK(qfi_series(tr).back().diagnostics.mixed_term_residual <= 1e-10);
}

}
