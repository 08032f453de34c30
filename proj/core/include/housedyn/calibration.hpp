#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "housedyn/dynamics.hpp"
#include "housedyn/timeseries.hpp"

namespace housedyn {

struct Interval {
  double lower;
  double upper;

  [[nodiscard]] bool contains(double v) const noexcept { return v >= lower && v <= upper; }
};

struct FitOptions {
  int restarts = 5;
  std::uint64_t seed = 1;
  int max_iter = 2000;
  double tolerance = 1e-8;
  double dt = 0.05;  // integration step for ODE fits
};

/// Fields shared by every least-squares fit.
struct FitStats {
  double sse = 0.0;
  int n_iter = 0;
  bool converged = false;
  std::size_t best_restart = 0;
  std::vector<double> residuals;  // observed - fitted
};

struct RatePricePair {
  double rate;
  double price;
};

/// Order: upper, drop, offset, steepness, midpoint, exponent.
using LogisticBounds = std::array<Interval, 6>;

[[nodiscard]] LogisticBounds default_logistic_bounds();
[[nodiscard]] std::array<double, 6> to_array(const LogisticCurve& c);
[[nodiscard]] LogisticCurve logistic_from_array(std::span<const double, 6> v);

struct LogisticFitReport : FitStats {
  LogisticCurve curve;
};

/// Least-squares fit of the generalised logistic curve to (rate, price)
/// pairs. Needs at least six pairs and a start inside `bounds`.
[[nodiscard]] LogisticFitReport fit_logistic(std::span<const RatePricePair> pairs, const LogisticCurve& init,
                                             const LogisticBounds& bounds = default_logistic_bounds(),
                                             const FitOptions& options = {});

struct OdeFitProblem {
  TimeSeries observed;      // quarterly price observations
  RatePath rates;
  Date epoch;               // t = 0 of the rate path
  SystemState initial;      // integration start
  OdeParams start;          // fixed values, and the initial guess for free ones
  std::vector<std::string> free;          // parameter-file names, e.g. {"k", "c"}
  std::map<std::string, Interval> bounds; // optional per free parameter
};

struct OdeFitReport : FitStats {
  OdeParams params;
  std::vector<std::string> free;
  std::vector<double> times;  // model time of each residual
};

/// Fits the free ODE coefficients so the simulated price tracks the observed
/// series. Candidates whose simulation fails are scored +inf.
[[nodiscard]] OdeFitReport fit_ode(const OdeFitProblem& problem, const FitOptions& options = {});

}  // namespace housedyn
