#include <doctest.h>

#include <random>

#include "drivetherm/bures.hpp"
#include "drivetherm/thermal.hpp"
#include "oracles.hpp"

using namespace drivetherm;

namespace {
HermitianOperator qubit(double omega = 1.0) { return HermitianOperator(0.5 * omega * pauli::z().matrix()); }
}  // namespace

TEST_SUITE("thermal-equilibrium") {

TEST_CASE("infinite temperature gives the maximally mixed state") {
  const auto g = make_gibbs(qubit(), 0.0);
  CHECK((g.state.matrix() - 0.5 * MatrixXc::Identity(2, 2)).norm() < 1e-15);
  std::mt19937_64 rng(21);
  const auto g4 = make_gibbs(HermitianOperator(oracle::random_hermitian(rng, 4)), 0.0);
  CHECK((g4.state.matrix() - 0.25 * MatrixXc::Identity(4, 4)).norm() < 1e-15);
  CHECK(g4.log_partition == doctest::Approx(std::log(4.0)));
}

TEST_CASE("qubit Gibbs populations follow tanh") {
  const double m = std::tanh(1.0);
  const auto g = make_gibbs(qubit(), 2.0);
  CHECK(std::abs(g.state.matrix()(0, 0).real() - (1 - m) / 2) < 1e-15);
  CHECK(std::abs(g.state.matrix()(1, 1).real() - (1 + m) / 2) < 1e-15);
  CHECK(std::abs(g.state.matrix()(0, 1)) < 1e-16);
}

TEST_CASE("Gibbs state matches the series exponential and commutes with H0") {
  std::mt19937_64 rng(22);
  for (Index d : {2, 3, 4}) {
    for (double beta : {0.1, 1.0, 5.0}) {
      const MatrixXc h = oracle::random_hermitian(rng, d);
      const auto g = make_gibbs(HermitianOperator(h), beta);
      CHECK((g.state.matrix() - oracle::gibbs_series(h, beta)).norm() < 1e-12);
      CHECK(commutator(g.state.matrix(), h).norm() < 1e-12);
      const MatrixXc e = oracle::expm_series(-beta * h);
      CHECK(g.log_partition == doctest::Approx(std::log(oracle::naive_trace(e).real())).epsilon(1e-12));
    }
  }
}

TEST_CASE("large beta does not overflow") {
  VectorXr e(3);
  e << -400.0, 0.0, 0.1;
  GibbsOptions o;
  o.beta_max = 1.0;
  o.rank_floor = 1e-300;
  const auto g = make_gibbs(HermitianOperator::diagonal(e), 0.05, o);
  CHECK(std::isfinite(g.log_partition));
  CHECK(g.state.matrix().trace().real() == doctest::Approx(1.0));
}

TEST_CASE("beta guard raises FullRankViolation with a hint") {
  CHECK_THROWS_AS(make_gibbs(qubit(), 60.0), FullRankViolation);
  CHECK_THROWS_AS(make_gibbs(qubit(), 45.0), FullRankViolation);  // p_min below 1e-18
  CHECK_NOTHROW(make_gibbs(qubit(), 40.0));
  try {
    make_gibbs(qubit(), 60.0);
  } catch (const FullRankViolation& e) {
    CHECK(std::string(e.what()).find("beta_max") != std::string::npos);
  }
  CHECK_THROWS_AS(make_gibbs(qubit(), -0.1), DomainError);
}

TEST_CASE("equilibrium SLD") {
  const auto g0 = make_gibbs(qubit(), 0.0);
  CHECK((equilibrium_sld(g0).matrix() + 0.5 * pauli::z().matrix()).norm() < 1e-15);

  const double m = std::tanh(1.0);
  const auto g = make_gibbs(qubit(), 2.0);
  const MatrixXc h = qubit().matrix();
  const double mean = oracle::naive_trace(oracle::naive_mul(g.state.matrix(), h)).real();
  CHECK(mean == doctest::Approx(-m / 2));
  const MatrixXc expect = -(0.5 * pauli::z().matrix() - mean * MatrixXc::Identity(2, 2));
  CHECK((equilibrium_sld(g).matrix() - expect).norm() < 1e-15);

  const auto gc = make_gibbs(HermitianOperator(2.5 * MatrixXc::Identity(3, 3)), 1.0);
  CHECK(equilibrium_sld(gc).matrix().norm() < 1e-15);

  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const auto gr = make_gibbs(HermitianOperator(oracle::random_hermitian(rng, 4)), 1.3);
    CHECK(std::abs(gr.state.expectation(equilibrium_sld(gr).matrix())) < 1e-12);
  }
}

TEST_CASE("equilibrium QFI values") {
  CHECK(equilibrium_qfi(make_gibbs(qubit(), 0.0)) == doctest::Approx(0.25).epsilon(1e-15));
  const auto g = make_gibbs(qubit(), 2.0);
  const MatrixXc h = qubit().matrix();
  const double e1 = oracle::naive_trace(oracle::naive_mul(g.state.matrix(), h)).real();
  const double e2 = oracle::naive_trace(oracle::naive_mul(g.state.matrix(), oracle::naive_mul(h, h))).real();
  CHECK(equilibrium_qfi(g) == doctest::Approx(e2 - e1 * e1).epsilon(1e-14));
  const double sech = 1.0 / std::cosh(1.0);
  CHECK(equilibrium_qfi(g) == doctest::Approx(0.25 * sech * sech).epsilon(1e-14));

  double prev = equilibrium_qfi(make_gibbs(qubit(), 2.0));
  for (double beta = 3.0; beta <= 40.0; beta += 1.0) {
    const double f = equilibrium_qfi(make_gibbs(qubit(), beta));
    CHECK(f < prev);
    prev = f;
  }
  CHECK(prev < 1e-15);
}

TEST_CASE("equilibrium QFI equals spectral QFI of the Gibbs family") {
  std::mt19937_64 rng(24);
  for (Index d : {2, 3, 4}) {
    for (double beta : {0.1, 1.0, 5.0}) {
      const MatrixXc h = oracle::random_hermitian(rng, d);
      const auto g = make_gibbs(HermitianOperator(h), beta);
      const double spec = spectral_qfi(g.state, gibbs_beta_derivative(g));
      CHECK(std::abs(spec - equilibrium_qfi(g)) < 1e-10);
      // derivative against a series-exponential finite difference
      const double hb = 1e-5;
      const MatrixXc fd = (oracle::gibbs_series(h, beta + hb) - oracle::gibbs_series(h, beta - hb)) / (2 * hb);
      CHECK((gibbs_beta_derivative(g).matrix() - fd).norm() < 1e-7);
    }
  }
}

TEST_CASE("qubit equilibrium QFI closed form over beta in [0, 20]") {
  for (double beta = 0.0; beta <= 20.0; beta += 0.05) {
    const double sech = 1.0 / std::cosh(beta / 2);
    const double exact = 0.25 * sech * sech;
    CHECK(std::abs(equilibrium_qfi(make_gibbs(qubit(), beta)) - exact) <= 1e-12 * exact);
  }
}

}
