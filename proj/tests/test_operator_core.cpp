#include <doctest.h>

#include <numbers>
#include <random>

#include "drivetherm/operator_core.hpp"
#include "oracles.hpp"

using namespace drivetherm;

TEST_SUITE("operator-core") {

TEST_CASE("eig of diagonal and Pauli inputs") {
  VectorXr d(2);
  d << 0.5, -0.5;
  const auto es = eig(HermitianOperator::diagonal(d));
  CHECK(es.eigenvalues(0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(es.eigenvalues(1) == doctest::Approx(0.5).epsilon(1e-15));

  const auto ex = eig(pauli::x());
  CHECK(ex.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(ex.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("eig agrees with characteristic polynomial roots") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXc a = oracle::random_hermitian(rng, 4);
    const auto es = eig(HermitianOperator(a));
    const auto roots = oracle::real_roots(oracle::char_poly(a));
    for (Index i = 0; i < 4; ++i) CHECK(std::abs(es.eigenvalues(i) - roots(i)) < 1e-8);
  }
}

TEST_CASE("eig reconstruction on random Hermitian matrices") {
  std::mt19937_64 rng(12);
  double worst = 0.0;
  for (Index d : {2, 3, 4, 8}) {
    for (int rep = 0; rep < 250; ++rep) {
      const MatrixXc a = oracle::random_hermitian(rng, d);
      const auto es = eig(HermitianOperator(a));
      worst = std::max(worst, (es.reconstruct() - a).norm() / a.norm());
      for (Index i = 1; i < d; ++i) REQUIRE(es.eigenvalues(i - 1) <= es.eigenvalues(i));
      REQUIRE(unitarity_defect<double>(es.eigenvectors) < 1e-10);
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("expm of zero generator is the identity") {
  const auto u = expm_hermitian_generator(HermitianOperator::zero(3), 1.7);
  CHECK((u.matrix() - MatrixXc::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("full qubit period gives -I") {
  const double omega = 1.0;
  const auto u = expm_hermitian_generator(HermitianOperator(0.5 * omega * pauli::z().matrix()), 2.0 * std::numbers::pi / omega);
  CHECK((u.matrix() + MatrixXc::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("expm matches power series") {
  const auto u = expm_hermitian_generator(pauli::x(), std::numbers::pi / 2);
  const MatrixXc ref = oracle::expm_i(oracle::pauli_x(), std::numbers::pi / 2);
  CHECK((u.matrix() - ref).norm() < 1e-14);
  CHECK((u.matrix() - Complex(0, -1) * oracle::pauli_x()).norm() < 1e-14);

  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXc a = oracle::random_hermitian(rng, 5);
    const auto v = expm_hermitian_generator(HermitianOperator(a), 0.8);
    CHECK((v.matrix() - oracle::expm_i(a, 0.8)).norm() < 1e-12);
  }
}

TEST_CASE("expm group property") {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 50; ++rep) {
    const HermitianOperator a(oracle::random_hermitian(rng, 4));
    const auto us = expm_hermitian_generator(a, 0.3);
    const auto ut = expm_hermitian_generator(a, 1.1);
    const auto ust = expm_hermitian_generator(a, 1.4);
    CHECK((us.matrix() * ut.matrix() - ust.matrix()).norm() < 1e-10);
    CHECK(ust.defect() < 1e-10);
  }
}

TEST_CASE("commutator examples and naive oracle") {
  CHECK(commutator(pauli::z(), pauli::z()).norm() == 0.0);
  CHECK((commutator(pauli::x(), pauli::z()) - Complex(0, -2) * pauli::y().matrix()).norm() < 1e-15);

  std::mt19937_64 rng(15);
  const MatrixXc a = oracle::random_hermitian(rng, 4);
  const MatrixXc b = oracle::random_hermitian(rng, 4);
  const MatrixXc ref = oracle::naive_mul(a, b) - oracle::naive_mul(b, a);
  CHECK((commutator(HermitianOperator(a), HermitianOperator(b)) - ref).norm() < 1e-13);
  CHECK_THROWS_AS(commutator(pauli::x(), HermitianOperator::zero(3)), DimensionMismatch);
}

TEST_CASE("Hermitian construction symmetrizes") {
  MatrixXc m(2, 2);
  m << 1.0, Complex(0.0, 1.0), 0.0, -1.0;
  std::string warned;
  const auto prev = log::set_warning_sink([&](std::string_view s) { warned = std::string(s); });
  const HermitianOperator h(m);
  log::set_warning_sink(prev);
  CHECK(!warned.empty());
  CHECK((h.matrix() - h.matrix().adjoint()).norm() == 0.0);
  CHECK(h.matrix()(0, 1) == Complex(0.0, 0.5));
  CHECK_THROWS_AS(HermitianOperator(MatrixXc::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("Unitary rejects non-unitary input") {
  CHECK_THROWS_AS(UnitaryOperator(2.0 * MatrixXc::Identity(2, 2)), ConvergenceError);
}

TEST_CASE("Pauli decomposition") {
  const MatrixXc a = 0.3 * oracle::pauli_x() - 0.2 * oracle::pauli_y() + 0.7 * oracle::pauli_z() + 0.1 * MatrixXc::Identity(2, 2);
  const auto c = pauli::decompose(HermitianOperator(a));
  CHECK(c(0) == doctest::Approx(0.3));
  CHECK(c(1) == doctest::Approx(-0.2));
  CHECK(c(2) == doctest::Approx(0.7));
}

TEST_CASE("core templates instantiate for long double") {
  using LD = long double;
  const auto es = eig(pauli::x<LD>());
  CHECK(static_cast<double>(es.eigenvalues(1)) == doctest::Approx(1.0));
  const auto u = expm_hermitian_generator(pauli::z<LD>(), LD(0.25));
  CHECK(static_cast<double>(u.defect()) < 1e-15);
}

}
