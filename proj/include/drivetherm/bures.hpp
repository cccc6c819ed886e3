#pragma once

// Bures-Jordan superoperator J_sigma(X) = {sigma, X}/2, its spectral
// inverse, the symmetric logarithmic derivative and the spectral QFI.

#include <algorithm>
#include <sstream>

#include "drivetherm/density_matrix.hpp"

namespace drivetherm {

/// Tangent vector to the state manifold: Hermitian and traceless.
template <typename Real>
class Tangent {
 public:
  using Matrix = ComplexMatrix<Real>;

  Tangent() = default;
  explicit Tangent(const Matrix& entries, Real trace_tolerance = Real(1e-10))
      : Tangent(Hermitian<Real>(entries), trace_tolerance) {}
  explicit Tangent(Hermitian<Real> h, Real trace_tolerance = Real(1e-10)) : entries_(std::move(h)) {
    const Real tr = entries_.trace();
    if (std::abs(tr) > trace_tolerance * std::max(Real(1), entries_.matrix().norm())) {
      std::ostringstream os;
      os << "tangent operator must be traceless, trace = " << tr;
      throw DomainError(os.str());
    }
  }

  static Tangent zero(Index dim) { return Tangent(Hermitian<Real>::zero(dim)); }

  Index dim() const noexcept { return entries_.dim(); }
  const Matrix& matrix() const noexcept { return entries_.matrix(); }
  const Hermitian<Real>& op() const noexcept { return entries_; }

 private:
  Hermitian<Real> entries_;
};

using TangentOperator = Tangent<double>;

namespace detail {
template <typename Real>
void check_dims(const Density<Real>& sigma, Index dim) {
  if (sigma.dim() != dim) {
    throw DimensionMismatch("state has dimension " + std::to_string(sigma.dim()) +
                            " but operator has dimension " + std::to_string(dim));
  }
}

template <typename Real>
void require_full_rank(const Density<Real>& sigma) {
  if (!sigma.full_rank()) {
    std::ostringstream os;
    os << "inverse Bures superoperator needs a full-rank state; min eigenvalue "
       << sigma.min_eigenvalue() << " <= rank floor " << sigma.rank_floor();
    throw FullRankViolation(os.str());
  }
}
}  // namespace detail

/// J_sigma(X) = (sigma X + X sigma)/2
template <typename Real>
Hermitian<Real> jordan_apply(const Density<Real>& sigma, const Hermitian<Real>& x) {
  detail::check_dims(sigma, x.dim());
  return Hermitian<Real>((sigma.matrix() * x.matrix() + x.matrix() * sigma.matrix()) / Real(2));
}

/// J^{-1}_sigma on an arbitrary (not necessarily Hermitian) matrix. In the
/// eigenbasis of sigma: Y_ij = 2 X_ij / (p_i + p_j).
template <typename Real>
ComplexMatrix<Real> jordan_inverse_apply_matrix(const Density<Real>& sigma, const ComplexMatrix<Real>& x) {
  detail::check_dims(sigma, x.rows());
  detail::require_full_rank(sigma);
  const auto& es = sigma.spectrum();
  ComplexMatrix<Real> y = es.to_eigenbasis(x);
  const auto& p = es.eigenvalues;
  for (Index j = 0; j < y.cols(); ++j)
    for (Index i = 0; i < y.rows(); ++i) y(i, j) *= Real(2) / (p(i) + p(j));
  return es.from_eigenbasis(y);
}

template <typename Real>
Hermitian<Real> jordan_inverse_apply(const Density<Real>& sigma, const Hermitian<Real>& x) {
  return Hermitian<Real>(jordan_inverse_apply_matrix(sigma, x.matrix()));
}

/// Symmetric logarithmic derivative: the L solving dsigma = {sigma, L}/2.
template <typename Real>
Hermitian<Real> sld(const Density<Real>& sigma, const Tangent<Real>& dsigma) {
  return jordan_inverse_apply(sigma, dsigma.op());
}

/// sum_{i,j} 2 |<i|dsigma|j>|^2 / (p_i + p_j), skipping pairs with
/// p_i + p_j <= min(1e-14 * 2 p_max, 2 * rank floor). The cap keeps every
/// pair of a full-rank state: populations just above the floor still carry
/// diagonal terms p (dlog p)^2 that the relative cutoff alone would drop.
template <typename Real>
Real spectral_qfi(const Density<Real>& sigma, const Tangent<Real>& dsigma) {
  detail::check_dims(sigma, dsigma.dim());
  const auto& es = sigma.spectrum();
  const ComplexMatrix<Real> d = es.to_eigenbasis(dsigma.matrix());
  const auto& p = es.eigenvalues;
  const Real cutoff = std::min(Real(1e-14) * Real(2) * p.maxCoeff(), Real(2) * sigma.rank_floor());
  Real f = 0;
  for (Index j = 0; j < d.cols(); ++j) {
    for (Index i = 0; i < d.rows(); ++i) {
      const Real denom = p(i) + p(j);
      if (denom > cutoff) f += Real(2) * std::norm(d(i, j)) / denom;
    }
  }
  return f;
}

}  // namespace drivetherm
