#include "drivetherm/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace drivetherm {

TimeGrid Problem::grid_for(const GibbsModel& m, double t) const {
  if (n_steps && t_end > 0.0) {
    const double dt = t_end / static_cast<double>(*n_steps);
    const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
    return TimeGrid(t, std::max<std::size_t>(steps, t > 0.0 ? 1 : 0));
  }
  return TimeGrid::automatic(t, std::max(bohr_bandwidth(m), drive.modulation_frequency()));
}

const char* to_string(ScanAxis axis) {
  switch (axis) {
    case ScanAxis::frequency: return "frequency";
    case ScanAxis::temperature: return "temperature";
    case ScanAxis::time: return "time";
  }
  return "unknown";
}

namespace {

ScanPoint to_point(const QfiResult& r, double axis_value) {
  return {axis_value, r.t, r.F_eq, r.I_t, r.F_total, r.F_spectral, r.rel_disagreement};
}

Problem apply_axis(const Problem& base, ScanAxis axis, double value) {
  Problem p = base;
  switch (axis) {
    case ScanAxis::frequency: {
      auto* c = std::get_if<CosineModulation>(&p.drive.temporal);
      if (!c) throw DomainError("frequency scan needs a cosine temporal modulation");
      c->omega_d = value;
      break;
    }
    case ScanAxis::temperature: p.beta = value; break;
    case ScanAxis::time: p.t_end = value; break;
  }
  return p;
}

}  // namespace

ScanPoint evaluate_point(const Problem& problem, const Reduction& reduce, double axis_value) {
  const GibbsModel model = problem.model();
  if (const auto* at = std::get_if<ValueAtTime>(&reduce)) {
    const TimeGrid grid = problem.grid_for(model, at->t);
    const QfiResult r =
        qfi_driven(model, problem.V, problem.drive, grid, grid.n_steps(), problem.engine, problem.propagation);
    return to_point(r, axis_value);
  }
  const auto& window = std::get<MaxOverTime>(reduce);
  const TimeGrid grid = problem.grid_for(model, window.t_window);
  const EvolutionTrace trace = propagate(model, problem.V, problem.drive, grid, problem.propagation);
  const auto series = qfi_series(trace, problem.engine);
  const auto best = std::max_element(series.begin(), series.end(),
                                     [](const QfiResult& a, const QfiResult& b) { return a.F_total < b.F_total; });
  return to_point(*best, axis_value);
}

std::size_t argmax_index(const std::vector<ScanPoint>& points) {
  if (points.empty()) throw DomainError("argmax of an empty scan");
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].F_total > points[best].F_total) best = i;
  return best;
}

ScanResult run_scan(const ScanSpec& spec, const ScanOptions& opts) {
  if (spec.values.empty()) throw DomainError("scan grid is empty");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (!(spec.values[i] > spec.values[i - 1])) throw DomainError("scan grid must be strictly increasing");

  const std::size_t n = spec.values.size();
  std::vector<ScanPoint> points(n);
  auto eval = [&](std::size_t i) {
    const Problem p = apply_axis(spec.fixed, spec.axis, spec.values[i]);
    const Reduction reduce = spec.axis == ScanAxis::time ? Reduction{ValueAtTime{spec.values[i]}} : spec.reduce;
    points[i] = evaluate_point(p, reduce, spec.values[i]);
  };

  unsigned workers = opts.parallelism == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.parallelism;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) eval(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t err_index = n;
    std::exception_ptr err;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            eval(i);
          } catch (...) {
            std::lock_guard lock(err_mutex);
            if (i < err_index) {
              err_index = i;
              err = std::current_exception();
            }
          }
        }
      });
    }
    pool.clear();
    if (err) std::rethrow_exception(err);
  }

  ScanResult result;
  result.axis = spec.axis;
  result.points = std::move(points);
  result.argmax_index = argmax_index(result.points);
  result.argmax = result.points[result.argmax_index].axis_value;
  return result;
}

ScanResult frequency_scan(const ScanSpec& spec, const ScanOptions& opts) {
  if (spec.axis != ScanAxis::frequency) throw DomainError("frequency_scan needs a frequency axis");
  return run_scan(spec, opts);
}

ScanResult temperature_scan(const ScanSpec& spec, const ScanOptions& opts) {
  if (spec.axis != ScanAxis::temperature) throw DomainError("temperature_scan needs a temperature axis");
  return run_scan(spec, opts);
}

double& DriveParameters::operator[](std::size_t i) {
  switch (i) {
    case 0: return omega_d;
    case 1: return beta0;
    case 2: return s_beta;
    case 3: return lambda0;
  }
  throw DomainError("drive parameter index out of range");
}

double DriveParameters::operator[](std::size_t i) const { return const_cast<DriveParameters&>(*this)[i]; }

namespace {

class DriveObjective {
 public:
  explicit DriveObjective(const OptimizeSpec& spec) : spec_(spec) {
    problem_ = spec.base;
    problem_.beta = spec.target_beta;
    model_ = problem_.model();
  }

  bool exhausted() const { return evaluations_ >= spec_.budget; }

  /// Returns F_total, or nothing once the budget is spent.
  std::optional<double> operator()(const DriveParameters& x) {
    if (exhausted()) return std::nullopt;
    ++evaluations_;
    Problem p = problem_;
    p.drive.lambda0 = x.lambda0;
    p.drive.envelope = GaussianEnvelope{x.beta0, x.s_beta};
    if (auto* c = std::get_if<CosineModulation>(&p.drive.temporal)) c->omega_d = x.omega_d;
    const TimeGrid grid = p.grid_for(model_, spec_.t_eval);
    const QfiResult r = qfi_driven(model_, p.V, p.drive, grid, grid.n_steps(), p.engine, p.propagation);
    trail.push_back({x, r.F_eq, r.I_t, r.F_total, r.F_spectral});
    return r.F_total;
  }

  std::vector<OptimizeStep> trail;

 private:
  const OptimizeSpec& spec_;
  Problem problem_;
  GibbsModel model_;
  std::size_t evaluations_ = 0;
};

}  // namespace

OptimizeResult optimize_drive(const OptimizeSpec& spec) {
  for (const auto& b : spec.bounds)
    if (b.hi < b.lo) throw DomainError("optimizer bound with hi < lo");
  if (spec.coarse_points < 2) throw DomainError("coarse grid needs at least 2 points");
  if (!spec.bounds[0].collapsed() && !std::holds_alternative<CosineModulation>(spec.base.drive.temporal)) {
    throw DomainError("optimizing omega_d needs a cosine temporal modulation");
  }

  DriveParameters x;
  for (std::size_t c = 0; c < DriveParameters::size; ++c) x[c] = 0.5 * (spec.bounds[c].lo + spec.bounds[c].hi);
  if (spec.analytic_seed) {
    const GibbsModel m = make_gibbs(spec.base.H0, spec.target_beta, spec.base.gibbs);
    const double bw = bohr_bandwidth(m);
    if (x.lambda0 > spec.weak_field_cap * bw) throw DomainError("lambda0 above the weak-field cap for analytic seeding");
    auto clamp = [&](std::size_t c, double v) { return std::clamp(v, spec.bounds[c].lo, spec.bounds[c].hi); };
    x.omega_d = clamp(0, bw);
    x.beta0 = clamp(1, spec.target_beta - x.s_beta);
  }

  DriveObjective f(spec);
  OptimizeResult out;
  auto first = f(x);
  out.best = x;
  out.best_F_total = first.value_or(0.0);

  auto consider = [&](const DriveParameters& cand) -> bool {
    const auto v = f(cand);
    if (!v) return false;
    if (*v > out.best_F_total) {
      out.best_F_total = *v;
      out.best = cand;
    }
    return true;
  };

  constexpr double inv_phi = 0.6180339887498949;
  for (std::size_t pass = 0; pass < spec.passes && !f.exhausted(); ++pass) {
    for (std::size_t c = 0; c < DriveParameters::size && !f.exhausted(); ++c) {
      const Interval b = spec.bounds[c];
      if (b.collapsed()) continue;
      const std::size_t n = spec.coarse_points;
      const double h = (b.hi - b.lo) / static_cast<double>(n - 1);
      std::size_t best_i = 0;
      double best_v = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        DriveParameters cand = out.best;
        cand[c] = i + 1 == n ? b.hi : b.lo + h * static_cast<double>(i);
        if (!consider(cand)) break;
        const double v = f.trail.back().F_total;
        if (v > best_v) {
          best_v = v;
          best_i = i;
        }
      }
      // Golden section on the bracket around the best coarse node.
      double lo = std::max(b.lo, b.lo + h * (static_cast<double>(best_i) - 1.0));
      double hi = std::min(b.hi, b.lo + h * (static_cast<double>(best_i) + 1.0));
      const DriveParameters anchor = out.best;
      auto at = [&](double v) {
        DriveParameters cand = anchor;
        cand[c] = v;
        return cand;
      };
      double x1 = hi - inv_phi * (hi - lo);
      double x2 = lo + inv_phi * (hi - lo);
      if (!consider(at(x1))) break;
      double f1 = f.trail.back().F_total;
      if (!consider(at(x2))) break;
      double f2 = f.trail.back().F_total;
      for (std::size_t it = 0; it < spec.golden_iterations; ++it) {
        if (f1 >= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - inv_phi * (hi - lo);
          if (!consider(at(x1))) break;
          f1 = f.trail.back().F_total;
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + inv_phi * (hi - lo);
          if (!consider(at(x2))) break;
          f2 = f.trail.back().F_total;
        }
      }
    }
  }
  out.budget_exhausted = f.exhausted();
  out.trail = std::move(f.trail);
  return out;
}

}  // namespace drivetherm
