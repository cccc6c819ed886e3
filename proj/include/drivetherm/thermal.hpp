#pragma once

// Gibbs states of the bare Hamiltonian and the equilibrium baseline.

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "drivetherm/bures.hpp"
#include "drivetherm/density_matrix.hpp"

namespace drivetherm {

struct GibbsOptions {
  double rank_floor = kDefaultRankFloor;
  /// Overrides the default guard 50 / (E_max - E_min).
  std::optional<double> beta_max;
};

template <typename Real>
struct Gibbs {
  Hermitian<Real> H0;
  Real beta = 0;
  Density<Real> state;
  Real log_partition = 0;
  /// Eigensystem of H0; the state is diagonal in the same basis.
  EigenSystem<Real> energies;
  Real beta_max = std::numeric_limits<Real>::infinity();

  Index dim() const noexcept { return H0.dim(); }
  /// Tr[H0 pi0]
  Real mean_energy() const {
    return state.spectrum().eigenvalues.dot(energies.eigenvalues);
  }
  /// Populations p_i aligned with energies.eigenvalues.
  const RealVector<Real>& populations() const { return state.spectrum().eigenvalues; }
};

using GibbsModel = Gibbs<double>;

/// 50 / (E_max - E_min); infinite for a trivial spectrum.
template <typename Real>
Real default_beta_max(const EigenSystem<Real>& energies) {
  const Real width = energies.eigenvalues.maxCoeff() - energies.eigenvalues.minCoeff();
  if (width <= Real(0)) return std::numeric_limits<Real>::infinity();
  return Real(50) / width;
}

/// pi0 = exp(-beta H0) / Z0, evaluated in the eigenbasis of H0 with the
/// ground energy shifted out of the exponent.
template <typename Real>
Gibbs<Real> make_gibbs(const Hermitian<Real>& H0, Real beta, const GibbsOptions& opts = {}) {
  if (!(beta >= Real(0))) throw DomainError("inverse temperature must be >= 0");
  Gibbs<Real> g;
  g.H0 = H0;
  g.beta = beta;
  g.energies = eig(H0);
  g.beta_max = opts.beta_max ? Real(*opts.beta_max) : default_beta_max(g.energies);
  if (beta > g.beta_max) {
    std::ostringstream os;
    os << "beta = " << beta << " exceeds the full-rank guard beta_max = " << g.beta_max
       << "; lower beta or raise beta_max in the tolerances section";
    throw FullRankViolation(os.str());
  }
  const auto& e = g.energies.eigenvalues;
  const Real e_min = e.minCoeff();
  RealVector<Real> w(e.size());
  for (Index i = 0; i < e.size(); ++i) w(i) = std::exp(-beta * (e(i) - e_min));
  const Real z = w.sum();
  g.log_partition = -beta * e_min + std::log(z);
  const RealVector<Real> p = w / z;

  // Populations decrease with energy; sort ascending for the state's spectrum.
  const Index d = e.size();
  EigenSystem<Real> es{RealVector<Real>(d), ComplexMatrix<Real>(d, d)};
  for (Index k = 0; k < d; ++k) {
    es.eigenvalues(k) = p(d - 1 - k);
    es.eigenvectors.col(k) = g.energies.eigenvectors.col(d - 1 - k);
  }
  typename Density<Real>::Tolerances tol;
  tol.rank_floor = Real(opts.rank_floor);
  g.state = Density<Real>::from_spectral(std::move(es), tol);
  if (!g.state.full_rank()) {
    std::ostringstream os;
    os << "Gibbs state at beta = " << beta << " has min population " << g.state.min_eigenvalue()
       << " <= rank floor " << opts.rank_floor << "; lower beta";
    throw FullRankViolation(os.str());
  }
  // Re-index energies so that energies.eigenvalues(k) matches populations()(k).
  g.energies.eigenvalues = g.energies.eigenvalues.reverse().eval();
  g.energies.eigenvectors = g.energies.eigenvectors.rowwise().reverse().eval();
  return g;
}

/// L_eq = -(H0 - <H0>)
template <typename Real>
Hermitian<Real> equilibrium_sld(const Gibbs<Real>& g) {
  const Index d = g.dim();
  return Hermitian<Real>(-(g.H0.matrix() - g.mean_energy() * ComplexMatrix<Real>::Identity(d, d)));
}

/// Var_{pi0}[H0] as sum_{i<j} p_i p_j (E_i - E_j)^2.
template <typename Real>
Real equilibrium_qfi(const Gibbs<Real>& g) {
  const auto& p = g.populations();
  const auto& e = g.energies.eigenvalues;
  Real f = 0;
  for (Index i = 0; i < p.size(); ++i)
    for (Index j = i + 1; j < p.size(); ++j) {
      const Real gap = e(i) - e(j);
      f += p(i) * p(j) * gap * gap;
    }
  return f;
}

/// d(pi0)/d(beta) = -(H0 - <H0>) pi0, built in the H0 eigenbasis.
template <typename Real>
Tangent<Real> gibbs_beta_derivative(const Gibbs<Real>& g) {
  const auto& p = g.populations();
  const auto& e = g.energies.eigenvalues;
  const Real mean = g.mean_energy();
  RealVector<Real> diag(p.size());
  for (Index i = 0; i < p.size(); ++i) diag(i) = -(e(i) - mean) * p(i);
  const ComplexMatrix<Real> d = g.energies.from_eigenbasis(
      diag.template cast<std::complex<Real>>().asDiagonal().toDenseMatrix());
  return Tangent<Real>(d);
}

}  // namespace drivetherm
