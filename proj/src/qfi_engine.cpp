#include "drivetherm/qfi_engine.hpp"

#include <algorithm>
#include <cmath>

namespace drivetherm {

namespace {

const Complex kMinusI(0.0, -1.0);

}  // namespace

namespace {

/// J_V in the eigenbasis of pi0: -i (p_j - p_i) V_ij * 2 / (p_i + p_j), so the
/// diagonal is exactly zero instead of round-off divided by small populations.
MatrixXc current_in_pi0_basis(const GibbsModel& model, const HermitianOperator& VH, CurrentFault fault) {
  if (VH.dim() != model.dim()) throw DimensionMismatch("current: operator and state dimensions differ");
  if (!model.state.full_rank()) throw FullRankViolation("current: Gibbs state is rank deficient");
  const auto& es = model.state.spectrum();
  const VectorXr& p = es.eigenvalues;
  MatrixXc y = es.to_eigenbasis(VH.matrix());
  for (Index j = 0; j < y.cols(); ++j)
    for (Index i = 0; i < y.rows(); ++i) {
      const Complex source = fault == CurrentFault::commutator_sign ? Complex(p(i) + p(j)) : kMinusI * (p(j) - p(i));
      y(i, j) *= source * 2.0 / (p(i) + p(j));
    }
  return y;
}

}  // namespace

HermitianOperator information_current(const GibbsModel& model, const HermitianOperator& VH, CurrentFault fault) {
  return HermitianOperator(model.state.spectrum().from_eigenbasis(current_in_pi0_basis(model, VH, fault)));
}

CurrentTrace build_current_trace(const EvolutionTrace& trace, CurrentFault fault) {
  CurrentTrace ct;
  ct.grid = trace.grid;
  ct.currents.reserve(trace.size());
  ct.weights.reserve(trace.size());
  const auto& es = trace.model.state.spectrum();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    ct.currents.push_back(information_current(trace.model, trace.heisenberg_V[k], fault));
    ct.weights.push_back(dlambda_dbeta(trace.drive, trace.grid.node(k), trace.beta));
  }
  ct.step_currents.reserve(trace.step_integrals.size());
  for (std::size_t k = 0; k < trace.step_integrals.size(); ++k) {
    ct.step_currents_pi0_basis.push_back(current_in_pi0_basis(trace.model, trace.step_integrals[k], fault));
    ct.step_currents.emplace_back(es.from_eigenbasis(ct.step_currents_pi0_basis.back()));
    ct.step_weights.push_back(step_weight(trace, k));
  }
  return ct;
}

Complex kernel(const GibbsModel& model, const HermitianOperator& Js, const HermitianOperator& Ju) {
  if (Js.dim() != model.dim() || Ju.dim() != model.dim()) throw DimensionMismatch("kernel: dimension mismatch");
  return (model.state.matrix() * Js.matrix() * Ju.matrix()).trace();
}

KernelIncrement increment_via_kernel_split(const CurrentTrace& ct, const GibbsModel& model, std::size_t k) {
  if (k >= ct.size()) throw DomainError("node index out of range");
  const VectorXr& p = model.populations();
  const std::vector<double>& c = ct.step_weights;

  double sym = 0.0;
  double anti = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    if (c[a] == 0.0) continue;
    const MatrixXc& ja = ct.step_currents_pi0_basis[a];
    for (std::size_t b = 0; b < k; ++b) {
      if (c[b] == 0.0) continue;
      const MatrixXc& jb = ct.step_currents_pi0_basis[b];
      // K(a,b) = sum_i p_i (Ja Jb)_ii
      Complex kab = 0.0;
      for (Index i = 0; i < ja.rows(); ++i) kab += p(i) * (ja.row(i).transpose().array() * jb.col(i).array()).sum();
      const double cc = c[a] * c[b];
      sym += cc * kab.real();
      anti += cc * kab.imag();
    }
  }
  return {sym, std::abs(anti)};
}

double increment_via_kernel(const CurrentTrace& ct, const GibbsModel& model, std::size_t k) {
  return increment_via_kernel_split(ct, model, k).symmetric;
}

double increment_via_kernel(const CurrentTrace& ct, const GibbsModel& model) {
  return increment_via_kernel(ct, model, ct.size() - 1);
}

std::vector<HermitianOperator> delta_L_series(const CurrentTrace& ct) {
  std::vector<HermitianOperator> out;
  out.reserve(ct.size());
  if (ct.size() == 0) return out;
  const Index d = ct.currents.front().dim();
  MatrixXc acc = MatrixXc::Zero(d, d);
  out.emplace_back(acc);
  for (std::size_t j = 0; j + 1 < ct.size(); ++j) {
    acc += ct.step_weights[j] * ct.step_currents[j].matrix();
    out.emplace_back(acc);
  }
  return out;
}

HermitianOperator delta_L(const CurrentTrace& ct, std::size_t k) {
  if (k >= ct.size()) throw DomainError("node index out of range");
  const Index d = ct.currents.front().dim();
  MatrixXc acc = MatrixXc::Zero(d, d);
  for (std::size_t j = 0; j < k; ++j) acc += ct.step_weights[j] * ct.step_currents[j].matrix();
  return HermitianOperator(acc);
}

double increment_from_delta_L(const GibbsModel& model, const HermitianOperator& dL) {
  const auto& es = model.state.spectrum();
  const MatrixXc x = es.to_eigenbasis(dL.matrix());
  const VectorXr& p = es.eigenvalues;
  double acc = 0.0;
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) acc += p(i) * std::norm(x(i, j));
  return acc;
}

double increment_via_deltaL(const CurrentTrace& ct, const GibbsModel& model, std::size_t k) {
  return increment_from_delta_L(model, delta_L(ct, k));
}

double increment_via_deltaL(const CurrentTrace& ct, const GibbsModel& model) {
  return increment_via_deltaL(ct, model, ct.size() - 1);
}

namespace {

QfiResult assemble(const EvolutionTrace& trace, const EngineOptions& opts, std::size_t k, double F_eq,
                   const MatrixXc& l_eq, const MatrixXc& dpi0, const HermitianOperator& dL,
                   const HermitianOperator& generator) {
  const GibbsModel& model = trace.model;
  QfiResult r;
  r.t = trace.grid.node(k);
  r.F_eq = F_eq;
  r.I_t = increment_from_delta_L(model, dL);
  r.F_total = r.F_eq + r.I_t;

  const MatrixXc& pi0 = model.state.matrix();
  const MatrixXc& b = generator.matrix();
  const MatrixXc& u = trace.propagators[k].matrix();
  const MatrixXc drho = u * (dpi0 + kMinusI * (b * pi0 - pi0 * b)) * u.adjoint();
  r.F_spectral = spectral_qfi(trace.state_at(k), TangentOperator(drho));
  r.rel_disagreement = std::abs(r.F_total - r.F_spectral) / std::max(r.F_spectral, opts.disagreement_floor);
  r.crb_sigma = 1.0 / std::sqrt(static_cast<double>(opts.n_measurements) * r.F_total);

  r.diagnostics.n_steps = trace.grid.n_steps();
  r.diagnostics.dt = trace.grid.dt();
  r.diagnostics.unitarity_drift = trace.max_unitarity_defect;
  r.diagnostics.mixed_term_residual = std::abs((pi0 * l_eq * dL.matrix()).trace());
  return r;
}

}  // namespace

std::vector<QfiResult> qfi_series(const EvolutionTrace& trace, const EngineOptions& opts) {
  if (opts.n_measurements == 0) throw DomainError("n_measurements must be positive");
  const GibbsModel& model = trace.model;
  const CurrentTrace ct = build_current_trace(trace, opts.fault);
  const auto dLs = delta_L_series(ct);
  const auto gens = beta_generator(trace);
  const double F_eq = equilibrium_qfi(model);
  const MatrixXc l_eq = equilibrium_sld(model).matrix();
  const MatrixXc dpi0 = gibbs_beta_derivative(model).matrix();

  std::vector<QfiResult> out;
  out.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) out.push_back(assemble(trace, opts, k, F_eq, l_eq, dpi0, dLs[k], gens[k]));
  return out;
}

QfiResult qfi_driven(const GibbsModel& model, const HermitianOperator& V, const DriveProfile& drive,
                     const TimeGrid& grid, std::size_t at, const EngineOptions& opts,
                     const PropagationOptions& prop) {
  if (at >= grid.size()) throw DomainError("evaluation node beyond the grid");
  if (opts.n_measurements == 0) throw DomainError("n_measurements must be positive");
  const TimeGrid partial(grid.node(at), at);
  const EvolutionTrace trace = propagate(model, V, drive, partial, prop);
  const CurrentTrace ct = build_current_trace(trace, opts.fault);
  const std::size_t k = trace.size() - 1;
  const HermitianOperator dL = delta_L(ct, k);
  const auto gens = beta_generator(trace);
  return assemble(trace, opts, k, equilibrium_qfi(model), equilibrium_sld(model).matrix(),
                  gibbs_beta_derivative(model).matrix(), dL, gens[k]);
}

}  // namespace drivetherm
