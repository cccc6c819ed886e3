#pragma once

#include <sstream>
#include <utility>

#include "drivetherm/operator_core.hpp"

namespace drivetherm {

inline constexpr double kDefaultRankFloor = 1e-18;

/// Hermitian, unit-trace, positive semidefinite state. The eigensystem is
/// computed once at construction and kept alongside the entries.
template <typename Real>
class Density {
 public:
  using Matrix = ComplexMatrix<Real>;

  struct Tolerances {
    Real trace = Real(1e-12);
    Real negativity = Real(1e-12);
    Real rank_floor = Real(kDefaultRankFloor);
  };

  Density() = default;

  explicit Density(const Matrix& entries) : Density(entries, Tolerances{}) {}
  Density(const Matrix& entries, const Tolerances& tol) : Density(Hermitian<Real>(entries), tol) {}
  Density(const Hermitian<Real>& h, const Tolerances& tol) : entries_(h), spectrum_(eig(h)), tol_(tol) {
    validate();
  }

  /// Build from a known spectral decomposition (eigenvalues ascending,
  /// eigenvector columns orthonormal).
  static Density from_spectral(EigenSystem<Real> es, const Tolerances& tol = {}) {
    Density d;
    d.entries_ = Hermitian<Real>(es.reconstruct());
    d.spectrum_ = std::move(es);
    d.tol_ = tol;
    d.validate();
    return d;
  }

  static Density maximally_mixed(Index dim) {
    return Density(Matrix::Identity(dim, dim) / Real(dim));
  }

  Index dim() const noexcept { return entries_.dim(); }
  const Matrix& matrix() const noexcept { return entries_.matrix(); }
  const Hermitian<Real>& op() const noexcept { return entries_; }
  const EigenSystem<Real>& spectrum() const noexcept { return spectrum_; }
  Real min_eigenvalue() const { return spectrum_.eigenvalues(0); }
  Real rank_floor() const noexcept { return tol_.rank_floor; }
  bool full_rank() const { return min_eigenvalue() > tol_.rank_floor; }

  /// Tr[rho X]
  std::complex<Real> expectation(const Matrix& x) const { return (entries_.matrix() * x).trace(); }

 private:
  void validate() const {
    const Real tr = entries_.trace();
    if (std::abs(tr - Real(1)) > tol_.trace) {
      std::ostringstream os;
      os << "density matrix trace " << tr << " differs from 1";
      throw DomainError(os.str());
    }
    if (spectrum_.eigenvalues.size() > 0 && spectrum_.eigenvalues(0) < -tol_.negativity) {
      std::ostringstream os;
      os << "density matrix has negative eigenvalue " << spectrum_.eigenvalues(0);
      throw DomainError(os.str());
    }
  }

  Hermitian<Real> entries_;
  EigenSystem<Real> spectrum_;
  Tolerances tol_;
};

using DensityMatrix = Density<double>;

}  // namespace drivetherm
