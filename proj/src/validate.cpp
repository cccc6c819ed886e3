#include "drivetherm/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "drivetherm/spin_analytics.hpp"

namespace drivetherm {

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed || c.skipped; });
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed && !c.skipped) out.push_back(c.name);
  return out;
}

std::string ValidationReport::table() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-26s %12s %12s  %s\n", "status", "check", "value", "tolerance", "detail");
  os << line;
  for (const auto& c : checks) {
    const char* status = c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL";
    std::snprintf(line, sizeof line, "%-6s %-26s %12.3e %12.3e  %s\n", status, c.name.c_str(), c.value, c.tolerance,
                  c.detail.c_str());
    os << line;
  }
  os << (all_passed() ? "all checks passed\n" : "validation FAILED\n");
  return os.str();
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : checks) {
    j.push_back({{"name", c.name},
                 {"status", c.skipped ? "skip" : c.passed ? "pass" : "fail"},
                 {"value", c.value},
                 {"tolerance", c.tolerance},
                 {"detail", c.detail}});
  }
  return {{"all_passed", all_passed()}, {"checks", j}};
}

namespace {

CheckResult at_most(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), std::isfinite(value) && value <= tol, false, value, tol, std::move(detail)};
}

CheckResult skipped(std::string name, std::string why) { return {std::move(name), false, true, 0.0, 0.0, std::move(why)}; }

template <typename F>
double max_over(const std::vector<QfiResult>& rows, F f) {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, f(r));
  return m;
}

}  // namespace

ValidationReport run_validation(const RunConfig& config, const ValidateOptions& opts) {
  ValidationReport rep;
  const ToleranceConfig& tol = config.tolerances;
  const double scale = tol.scale;

  Problem p = make_problem(config);
  p.engine.fault = opts.fault;
  const GibbsModel model = p.model();
  const TimeGrid grid = p.grid_for(model, p.t_end);
  const EvolutionTrace trace = propagate(model, p.V, p.drive, grid, p.propagation);
  const auto rows = qfi_series(trace, p.engine);

  rep.checks.push_back(at_most("dual_path", max_over(rows, [](const QfiResult& r) { return r.rel_disagreement; }),
                               tol.rel_disagreement, "max |F_eq + I_t - F_spectral| / F_spectral over the grid"));

  const CurrentTrace ct = build_current_trace(trace, opts.fault);
  const KernelIncrement ki = increment_via_kernel_split(ct, model, ct.size() - 1);
  const double via_dl = increment_via_deltaL(ct, model);
  const double kscale = std::max({std::abs(via_dl), std::abs(ki.symmetric), 1e-300});
  rep.checks.push_back(at_most("kernel_vs_deltaL", std::abs(ki.symmetric - via_dl) / kscale, 1e-9 * scale,
                               "double-integral kernel path against Tr[pi0 dL^2] at t_end"));
  rep.checks.push_back(at_most("kernel_antisymmetric", ki.antisymmetric / std::max(kscale, 1.0), 1e-10 * scale,
                               "antisymmetric kernel part integrates to zero"));

  rep.checks.push_back(at_most("mixed_term",
                               max_over(rows, [](const QfiResult& r) { return r.diagnostics.mixed_term_residual; }),
                               tol.mixed_term, "max |Tr[pi0 L_eq dL]|"));

  double worst_gain = 0.0;
  for (const auto& r : rows) worst_gain = std::max({worst_gain, -r.I_t, r.F_eq - r.F_total});
  rep.checks.push_back(at_most("positivity", worst_gain, tol.increment_floor, "I_t >= 0 and F_total >= F_eq"));

  rep.checks.push_back(at_most("unitarity", trace.max_unitarity_defect, tol.unitarity, "max ||U^dagger U - I||_F"));

  {
    const TangentOperator d0 = gibbs_beta_derivative(model);
    const double f_spec = spectral_qfi(model.state, d0);
    const double f_eq = equilibrium_qfi(model);
    const double rel = std::abs(f_spec - f_eq) / std::max(f_eq, 1e-300);
    rep.checks.push_back(at_most("equilibrium_qfi", f_eq > 0 ? rel : std::abs(f_spec - f_eq), 1e-12 * scale,
                                 "pairwise F_eq against spectral QFI of the Gibbs family"));
    if (const auto* q = std::get_if<QubitSpec>(&config.model.H0)) {
      const double exact = spin::qubit_equilibrium_qfi(q->omega, model.beta);
      rep.checks.push_back(at_most("equilibrium_closed_form", std::abs(f_eq - exact) / std::max(exact, 1e-300),
                                   1e-12 * scale, "(Omega/2)^2 sech^2(beta Omega/2)"));
    }
  }

  {
    Problem c = p;
    c.drive.envelope = ConstantEnvelope{};
    const auto cr = qfi_series(propagate(model, c.V, c.drive, grid, c.propagation), c.engine);
    rep.checks.push_back(at_most("no_go_constant_envelope",
                                 max_over(cr, [](const QfiResult& r) { return std::abs(r.F_spectral - r.F_eq); }),
                                 1e-9 * scale, "beta-independent drive leaves F at F_eq"));
  }

  {
    const auto cr = qfi_series(propagate(model, p.H0, p.drive, grid, p.propagation), p.engine);
    rep.checks.push_back(at_most("commuting_perturbation",
                                 max_over(cr, [](const QfiResult& r) { return std::abs(r.I_t); }), 1e-12 * scale,
                                 "V = H0 gives no increment"));
  }

  {
    const std::size_t k = grid.n_steps();
    const TangentOperator a = drho_dbeta_analytic(trace, k);
    const TangentOperator f = drho_dbeta_fd(model, p.V, p.drive, grid, k, 0.0, p.propagation);
    rep.checks.push_back(at_most("analytic_vs_fd_derivative", (a.matrix() - f.matrix()).norm(), 1e-5 * scale,
                                 "||d rho/d beta analytic - centred difference||_F at t_end"));
  }

  const auto* q = std::get_if<QubitSpec>(&config.model.H0);
  const auto* vx = std::get_if<PauliSpec>(&config.model.V);
  if (q && vx && vx->axis == 'x' && std::holds_alternative<GaussianEnvelope>(p.drive.envelope)) {
    const double t = 1e-3;
    const TimeGrid g(t, 1);
    const QfiResult r = qfi_driven(model, p.V, p.drive, g, 1, p.engine, p.propagation);
    const double m = spin::magnetization(q->omega, model.beta);
    const double lam = p.drive.lambda0 * vx->scale * p.drive.modulation_at(0.0);
    const double expect = spin::short_time_coefficient(m, lam, p.drive.envelope_derivative(model.beta));
    if (expect > 1e-300) {
      rep.checks.push_back(at_most("qubit_short_time", std::abs(r.I_t / (t * t) - expect) / expect, 1e-3 * scale,
                                   "I_t / t^2 against 4 m^2 (lambda0 G')^2 at t = 1e-3"));
    } else {
      rep.checks.push_back(skipped("qubit_short_time", "G'(beta) f(0) vanishes"));
    }
  } else {
    rep.checks.push_back(skipped("qubit_short_time", "needs a qubit H0, sigma_x coupling and gaussian envelope"));
  }

  return rep;
}

}  // namespace drivetherm
