#pragma once

// Dense complex linear algebra for small Hermitian and unitary matrices.
// Everything here is templated on the real scalar type; the double
// instantiation is what the rest of the library uses.

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "drivetherm/errors.hpp"
#include "drivetherm/log.hpp"

namespace drivetherm {

using Index = Eigen::Index;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using MatrixXc = ComplexMatrix<double>;
using VectorXr = RealVector<double>;

inline constexpr Index kMaxDimension = 32;

/// Asymmetry above which construction of a Hermitian operator warns.
inline constexpr double kHermiticityWarnThreshold = 1e-10;

template <typename Real>
class Hermitian {
 public:
  using Matrix = ComplexMatrix<Real>;

  Hermitian() = default;

  /// Symmetrizes as (A + A^dagger)/2.
  explicit Hermitian(Matrix entries) {
    if (entries.rows() != entries.cols()) {
      throw DimensionMismatch("Hermitian operator must be square, got " +
                              std::to_string(entries.rows()) + "x" +
                              std::to_string(entries.cols()));
    }
    const Real scale = std::max<Real>(Real(1), entries.norm());
    const Real asym = (entries - entries.adjoint()).norm() / Real(2);
    if (asym > Real(kHermiticityWarnThreshold) * scale) {
      std::ostringstream os;
      os << "symmetrizing operator with Hermiticity defect " << asym;
      log::warn(os.str());
    }
    entries_ = (entries + entries.adjoint()) / Real(2);
  }

  static Hermitian zero(Index dim) { return Hermitian(Matrix::Zero(dim, dim), Trusted{}); }
  static Hermitian identity(Index dim) { return Hermitian(Matrix::Identity(dim, dim), Trusted{}); }
  static Hermitian diagonal(const RealVector<Real>& d) {
    return Hermitian(d.template cast<std::complex<Real>>().asDiagonal().toDenseMatrix(), Trusted{});
  }

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  std::complex<Real> operator()(Index i, Index j) const { return entries_(i, j); }

  Real trace() const { return entries_.trace().real(); }

  Hermitian operator+(const Hermitian& o) const { return combine(o, entries_ + o.entries_); }
  Hermitian operator-(const Hermitian& o) const { return combine(o, entries_ - o.entries_); }
  Hermitian operator-() const { return Hermitian(-entries_, Trusted{}); }
  Hermitian& operator+=(const Hermitian& o) {
    check_same_dim(o);
    entries_ += o.entries_;
    return *this;
  }
  friend Hermitian operator*(Real s, const Hermitian& h) { return Hermitian(s * h.entries_, Trusted{}); }
  friend Hermitian operator*(const Hermitian& h, Real s) { return s * h; }

 private:
  struct Trusted {};
  Hermitian(Matrix m, Trusted) : entries_(std::move(m)) {}

  void check_same_dim(const Hermitian& o) const {
    if (o.dim() != dim()) throw DimensionMismatch("operator dimensions differ");
  }
  Hermitian combine(const Hermitian& o, Matrix m) const {
    check_same_dim(o);
    return Hermitian(std::move(m), Trusted{});
  }

  Matrix entries_;
};

template <typename Real>
Real unitarity_defect(const ComplexMatrix<Real>& u) {
  return (u.adjoint() * u - ComplexMatrix<Real>::Identity(u.rows(), u.cols())).norm();
}

template <typename Real>
class Unitary {
 public:
  using Matrix = ComplexMatrix<Real>;

  Unitary() = default;

  /// Throws ConvergenceError when ||U^dagger U - I||_F exceeds `tolerance`.
  explicit Unitary(Matrix entries, Real tolerance = Real(1e-10)) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw DimensionMismatch("unitary must be square");
    const Real defect = unitarity_defect<Real>(entries_);
    if (!(defect <= tolerance)) {
      std::ostringstream os;
      os << "matrix is not unitary: ||U^dagger U - I||_F = " << defect;
      throw ConvergenceError(os.str());
    }
  }

  static Unitary identity(Index dim) { return Unitary(Matrix::Identity(dim, dim)); }

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  Real defect() const { return unitarity_defect<Real>(entries_); }

  /// U^dagger A U
  Hermitian<Real> heisenberg(const Hermitian<Real>& a) const {
    return Hermitian<Real>(entries_.adjoint() * a.matrix() * entries_);
  }
  /// U A U^dagger
  Hermitian<Real> conjugate(const Hermitian<Real>& a) const {
    return Hermitian<Real>(entries_ * a.matrix() * entries_.adjoint());
  }

 private:
  Matrix entries_;
};

template <typename Real>
struct EigenSystem {
  RealVector<Real> eigenvalues;      // ascending
  ComplexMatrix<Real> eigenvectors;  // columns

  Index dim() const noexcept { return eigenvalues.size(); }

  ComplexMatrix<Real> reconstruct() const {
    return eigenvectors * eigenvalues.template cast<std::complex<Real>>().asDiagonal() *
           eigenvectors.adjoint();
  }

  /// Q^dagger X Q
  ComplexMatrix<Real> to_eigenbasis(const ComplexMatrix<Real>& x) const {
    return eigenvectors.adjoint() * x * eigenvectors;
  }
  /// Q X Q^dagger
  ComplexMatrix<Real> from_eigenbasis(const ComplexMatrix<Real>& x) const {
    return eigenvectors * x * eigenvectors.adjoint();
  }
};

template <typename Real>
EigenSystem<Real> eig(const Hermitian<Real>& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("Hermitian eigendecomposition did not converge (dim " +
                           std::to_string(a.dim()) + ")");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// exp(-i s A) from a precomputed eigensystem of A.
template <typename Real>
Unitary<Real> expm_hermitian_generator(const EigenSystem<Real>& es, Real s) {
  const std::complex<Real> minus_i(Real(0), Real(-1));
  const RealVector<Real>& lam = es.eigenvalues;
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> phases(lam.size());
  for (Index k = 0; k < lam.size(); ++k) phases(k) = std::exp(minus_i * s * lam(k));
  return Unitary<Real>(es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint());
}

/// exp(-i s A).
template <typename Real>
Unitary<Real> expm_hermitian_generator(const Hermitian<Real>& a, Real s) {
  return expm_hermitian_generator(eig(a), s);
}

/// AB - BA; anti-Hermitian for Hermitian arguments.
template <typename Real>
ComplexMatrix<Real> commutator(const Hermitian<Real>& a, const Hermitian<Real>& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("commutator of operators with different dimensions");
  return a.matrix() * b.matrix() - b.matrix() * a.matrix();
}

template <typename DerivedA, typename DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("commutator of operators with different dimensions");
  }
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = a * b - b * a;
  return out;
}

namespace pauli {

template <typename Real = double>
Hermitian<Real> x() {
  ComplexMatrix<Real> m(2, 2);
  m << 0, 1, 1, 0;
  return Hermitian<Real>(m);
}

template <typename Real = double>
Hermitian<Real> y() {
  using C = std::complex<Real>;
  ComplexMatrix<Real> m(2, 2);
  m << C(0), C(0, -1), C(0, 1), C(0);
  return Hermitian<Real>(m);
}

template <typename Real = double>
Hermitian<Real> z() {
  ComplexMatrix<Real> m(2, 2);
  m << 1, 0, 0, -1;
  return Hermitian<Real>(m);
}

/// Components (c_x, c_y, c_z) with A = c_0 I + c . sigma for a 2x2 Hermitian A.
template <typename Real = double>
Eigen::Matrix<Real, 3, 1> decompose(const Hermitian<Real>& a) {
  if (a.dim() != 2) throw DimensionMismatch("Pauli decomposition needs a 2x2 operator");
  const auto& m = a.matrix();
  return {m(1, 0).real(), m(1, 0).imag(), (m(0, 0).real() - m(1, 1).real()) / Real(2)};
}

}  // namespace pauli

using HermitianOperator = Hermitian<double>;
using UnitaryOperator = Unitary<double>;

}  // namespace drivetherm
