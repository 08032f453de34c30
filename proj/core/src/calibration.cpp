#include "housedyn/calibration.hpp"

#include <cmath>
#include <limits>

#include "housedyn/error.hpp"
#include "housedyn/optimize.hpp"

namespace housedyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> initial_steps(std::span<const double> x) {
  std::vector<double> steps(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) steps[j] = x[j] != 0.0 ? 0.1 * std::abs(x[j]) : 0.1;
  return steps;
}

MultiStartOptions to_multistart(const FitOptions& o) {
  MultiStartOptions m;
  m.restarts = o.restarts;
  m.seed = o.seed;
  m.local.max_iter = o.max_iter;
  m.local.f_tol = o.tolerance;
  return m;
}

}  // namespace

LogisticBounds default_logistic_bounds() {
  return {Interval{0.0, 1e5}, Interval{1e-9, 1e5}, Interval{1e-6, 1e3},
          Interval{1e-6, 100.0}, Interval{-50.0, 50.0}, Interval{1e-3, 1e3}};
}

std::array<double, 6> to_array(const LogisticCurve& c) {
  return {c.upper, c.drop, c.offset, c.steepness, c.midpoint, c.exponent};
}

LogisticCurve logistic_from_array(std::span<const double, 6> v) {
  return LogisticCurve{v[0], v[1], v[2], v[3], v[4], v[5]};
}

LogisticFitReport fit_logistic(std::span<const RatePricePair> pairs, const LogisticCurve& init,
                               const LogisticBounds& bounds, const FitOptions& options) {
  if (pairs.size() < 6) {
    fail(ErrorKind::kDomain, "fit_logistic: need at least 6 (rate, price) pairs, got " + std::to_string(pairs.size()));
  }
  const auto x0 = to_array(init);
  for (std::size_t j = 0; j < x0.size(); ++j) {
    if (!bounds[j].contains(x0[j])) fail(ErrorKind::kDomain, "fit_logistic: initial curve lies outside the bounds");
  }

  Bounds box;
  for (const auto& b : bounds) {
    box.lower.push_back(b.lower);
    box.upper.push_back(b.upper);
  }
  const Objective sse = [&](std::span<const double> v) {
    if (!box.contains(v)) return kInf;
    const auto curve = logistic_from_array(std::span<const double, 6>(v.data(), 6));
    double total = 0.0;
    for (const auto& p : pairs) {
      const double e = p.price - eval_G(curve, p.rate);
      total += e * e;
    }
    return total;
  };

  const std::vector<double> start(x0.begin(), x0.end());
  const auto steps = initial_steps(start);
  const auto ms = multistart_nelder_mead(sse, start, steps, to_multistart(options), &box);

  LogisticFitReport report;
  report.curve = logistic_from_array(std::span<const double, 6>(ms.best.x.data(), 6));
  report.sse = ms.best.f;
  report.n_iter = ms.best.iterations;
  report.converged = ms.best.converged && ms.improved_on_start;
  report.best_restart = ms.best_restart;
  for (const auto& p : pairs) report.residuals.push_back(p.price - eval_G(report.curve, p.rate));
  return report;
}

OdeFitReport fit_ode(const OdeFitProblem& problem, const FitOptions& options) {
  if (problem.free.empty()) fail(ErrorKind::kDomain, "fit_ode: no free parameters");
  problem.start.validate();

  std::vector<double> times;
  std::vector<double> observed;
  for (const auto& p : problem.observed.points()) {
    const double t = quarters_since(problem.epoch, p.date);
    if (t < problem.initial.t) continue;
    if (!problem.rates.covers(problem.initial.t, t)) continue;
    times.push_back(t);
    observed.push_back(p.value);
  }
  if (times.empty()) fail(ErrorKind::kDomain, "fit_ode: observations do not overlap the rate path");

  Bounds box;
  std::vector<double> x0;
  for (const auto& name : problem.free) {
    x0.push_back(ode_param(problem.start, name));
    const auto it = problem.bounds.find(name);
    box.lower.push_back(it == problem.bounds.end() ? -kInf : it->second.lower);
    box.upper.push_back(it == problem.bounds.end() ? kInf : it->second.upper);
  }
  if (!box.contains(x0)) fail(ErrorKind::kDomain, "fit_ode: initial values lie outside the bounds");

  const auto params_at = [&](std::span<const double> v) {
    OdeParams p = problem.start;
    for (std::size_t j = 0; j < v.size(); ++j) ode_param(p, problem.free[j]) = v[j];
    return p;
  };

  const Objective sse = [&](std::span<const double> v) {
    if (!box.contains(v)) return kInf;
    try {
      const auto states = simulate_at(problem.initial, problem.rates, params_at(v), times, options.dt);
      double total = 0.0;
      for (std::size_t i = 0; i < states.size(); ++i) {
        const double e = observed[i] - states[i].price;
        total += e * e;
      }
      return total;
    } catch (const Error&) {
      return kInf;
    }
  };

  const auto steps = initial_steps(x0);
  const auto ms = multistart_nelder_mead(sse, x0, steps, to_multistart(options), &box);

  OdeFitReport report;
  report.params = params_at(ms.best.x);
  report.free = problem.free;
  report.sse = ms.best.f;
  report.n_iter = ms.best.iterations;
  report.converged = ms.best.converged && ms.improved_on_start && std::isfinite(ms.best.f);
  report.best_restart = ms.best_restart;
  report.times = times;
  if (std::isfinite(ms.best.f)) {
    const auto states = simulate_at(problem.initial, problem.rates, report.params, times, options.dt);
    for (std::size_t i = 0; i < states.size(); ++i) report.residuals.push_back(observed[i] - states[i].price);
  }
  return report;
}

}  // namespace housedyn
