#include "drivetherm/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace drivetherm {

TimeGrid::TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("time grid end must be finite and >= 0");
  if (t_end == 0.0) {
    n_steps_ = 0;
  } else if (n_steps == 0) {
    throw DomainError("time grid with t_end > 0 needs at least one step");
  }
}

std::size_t TimeGrid::auto_steps(double t_end, double fastest_frequency) {
  if (t_end <= 0.0) return 0;
  const double n = std::ceil(200.0 * t_end * fastest_frequency / (2.0 * std::numbers::pi));
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

TimeGrid TimeGrid::automatic(double t_end, double fastest_frequency) {
  return TimeGrid(t_end, auto_steps(t_end, fastest_frequency));
}

double TimeGrid::node(std::size_t k) const {
  if (k > n_steps_) throw DomainError("time grid node index out of range");
  if (k == n_steps_) return t_end_;
  return static_cast<double>(k) * dt();
}

std::size_t TimeGrid::nearest(double t) const {
  if (n_steps_ == 0) return 0;
  const double k = std::round(std::clamp(t, 0.0, t_end_) / dt());
  return std::min(n_steps_, static_cast<std::size_t>(k));
}

double bohr_bandwidth(const GibbsModel& model) {
  const auto& e = model.energies.eigenvalues;
  return e.maxCoeff() - e.minCoeff();
}

DensityMatrix EvolutionTrace::state_at(std::size_t k) const {
  const MatrixXc& u = propagators.at(k).matrix();
  // U pi0 U^dagger has the populations of pi0 and eigenvectors U Q; reusing
  // them keeps populations near the rank floor exact instead of re-solving.
  const auto& es = model.state.spectrum();
  EigenSystem<double> rotated{es.eigenvalues, u * es.eigenvectors};
  DensityMatrix::Tolerances tol;
  tol.trace = std::max(tol.trace, 2.0 * max_unitarity_defect);
  tol.rank_floor = model.state.rank_floor();
  return DensityMatrix::from_spectral(std::move(rotated), tol);
}

namespace {

/// int_0^dt exp(i omega tau) d tau
Complex step_phase_integral(double omega, double dt) {
  const double x = omega * dt;
  if (std::abs(x) < 1e-4) return dt * Complex(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0);
  return dt * Complex(std::sin(x) / x, (1.0 - std::cos(x)) / x);
}

}  // namespace

EvolutionTrace propagate(const GibbsModel& model, const HermitianOperator& V, const DriveProfile& drive,
                         const TimeGrid& grid, const PropagationOptions& opts) {
  if (V.dim() != model.dim()) throw DimensionMismatch("perturbation and Hamiltonian dimensions differ");
  EvolutionTrace trace;
  trace.grid = grid;
  trace.beta = model.beta;
  trace.model = model;
  trace.drive = drive;
  trace.V = V;
  trace.propagators.reserve(grid.size());
  trace.heisenberg_V.reserve(grid.size());
  trace.step_integrals.reserve(grid.n_steps());

  const Index d = model.dim();
  const double dt = grid.dt();
  MatrixXc u = MatrixXc::Identity(d, d);
  trace.propagators.emplace_back(u, opts.unitarity_tolerance);
  trace.heisenberg_V.push_back(V);

  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(d);
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> phases(d);
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    const double t_mid = grid.node(k) + 0.5 * dt;
    const MatrixXc h = model.H0.matrix() + lambda_at(drive, t_mid, model.beta) * V.matrix();
    solver.compute(h);
    if (solver.info() != Eigen::Success) throw ConvergenceError("step Hamiltonian eigendecomposition failed");
    for (Index i = 0; i < d; ++i) phases(i) = std::polar(1.0, -dt * solver.eigenvalues()(i));
    const MatrixXc& q = solver.eigenvectors();

    // int_0^dt e^{i tau h} V e^{-i tau h} d tau in the eigenbasis of h
    MatrixXc vq = q.adjoint() * V.matrix() * q;
    for (Index b = 0; b < d; ++b)
      for (Index a = 0; a < d; ++a) vq(a, b) *= step_phase_integral(solver.eigenvalues()(a) - solver.eigenvalues()(b), dt);
    const MatrixXc qu = q.adjoint() * u;
    trace.step_integrals.emplace_back(MatrixXc(qu.adjoint() * vq * qu));

    u = (q * phases.asDiagonal() * qu).eval();

    const double defect = unitarity_defect<double>(u);
    trace.max_unitarity_defect = std::max(trace.max_unitarity_defect, defect);
    if (!(defect <= opts.unitarity_tolerance)) {
      std::ostringstream os;
      os << "unitarity drift " << defect << " at t = " << grid.node(k + 1) << " exceeds "
         << opts.unitarity_tolerance;
      throw StepSizeTooCoarse(os.str(), 2 * grid.n_steps());
    }
    trace.propagators.emplace_back(u, opts.unitarity_tolerance);
    trace.heisenberg_V.push_back(trace.propagators.back().heisenberg(V));
  }
  return trace;
}

double step_weight(const EvolutionTrace& trace, std::size_t k) {
  return dlambda_dbeta(trace.drive, trace.grid.node(k) + 0.5 * trace.grid.dt(), trace.beta);
}

namespace {

MatrixXc generator_at(const EvolutionTrace& trace, std::size_t k) {
  const Index d = trace.model.dim();
  MatrixXc b = MatrixXc::Zero(d, d);
  for (std::size_t j = 0; j < k; ++j) b += step_weight(trace, j) * trace.step_integrals[j].matrix();
  return b;
}

}  // namespace

std::vector<HermitianOperator> beta_generator(const EvolutionTrace& trace) {
  const Index d = trace.model.dim();
  std::vector<HermitianOperator> out;
  out.reserve(trace.size());
  MatrixXc b = MatrixXc::Zero(d, d);
  out.emplace_back(b);
  for (std::size_t j = 0; j + 1 < trace.size(); ++j) {
    b += step_weight(trace, j) * trace.step_integrals[j].matrix();
    out.emplace_back(b);
  }
  return out;
}

TangentOperator drho_dbeta_analytic(const EvolutionTrace& trace, std::size_t k) {
  if (k >= trace.size()) throw DomainError("node index out of range");
  const MatrixXc b = generator_at(trace, k);
  const MatrixXc& pi0 = trace.model.state.matrix();
  // [A, pi0] with A = -i B
  const MatrixXc dyn = Complex(0.0, -1.0) * (b * pi0 - pi0 * b);
  const MatrixXc inner = gibbs_beta_derivative(trace.model).matrix() + dyn;
  const MatrixXc& u = trace.propagators[k].matrix();
  MatrixXc out = u * inner * u.adjoint();
  out.diagonal().array() -= out.trace() / static_cast<double>(out.rows());
  return TangentOperator(out);
}

double default_beta_step(double beta) { return 1e-5 * std::max(1.0, std::abs(beta)); }

TangentOperator drho_dbeta_fd(const GibbsModel& model, const HermitianOperator& V, const DriveProfile& drive,
                              const TimeGrid& grid, std::size_t k, double h_beta,
                              const PropagationOptions& opts) {
  const double h = h_beta > 0.0 ? h_beta : default_beta_step(model.beta);
  if (model.beta - h < 0.0) throw DomainError("beta - h_beta falls below 0");
  GibbsOptions gopts;
  gopts.rank_floor = model.state.rank_floor();
  gopts.beta_max = model.beta_max;

  auto rho_at = [&](double beta) {
    const GibbsModel g = make_gibbs(model.H0, beta, gopts);
    TimeGrid partial(grid.node(k), k);
    const EvolutionTrace tr = propagate(g, V, drive, partial, opts);
    const MatrixXc& u = tr.propagators.back().matrix();
    return MatrixXc(u * g.state.matrix() * u.adjoint());
  };
  const MatrixXc plus = rho_at(model.beta + h);
  const MatrixXc minus = rho_at(model.beta - h);
  MatrixXc diff = (plus - minus) / (2.0 * h);
  // Unitarity drift leaves a trace residue of order defect / h; drop it.
  diff.diagonal().array() -= diff.trace() / static_cast<double>(diff.rows());

  const double noise = 1e-16 * std::max(plus.norm(), 1.0) / h;
  const double scale = diff.norm();
  if (scale > 0.0 && noise / scale > 1e-4) {
    std::ostringstream os;
    os << "finite-difference step h_beta = " << h << " is dominated by cancellation (relative noise "
       << noise / scale << ")";
    log::warn(os.str());
  }
  return TangentOperator(diff);
}

}  // namespace drivetherm
