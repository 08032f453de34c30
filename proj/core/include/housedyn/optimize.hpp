#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace housedyn {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  int max_iter = 2000;
  /// Converged when f_worst - f_best <= f_tol * (1 + |f_best|) and every
  /// vertex lies within x_tol * (1 + |x_best|) of the best one, per coordinate.
  double f_tol = 1e-8;
  double x_tol = 1e-6;
  /// After convergence the simplex is rebuilt at the optimum up to this many
  /// times, stopping early once a rebuild no longer improves f.
  int rebuilds = 3;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimisation. `steps` sets the initial simplex edge per
/// coordinate. Non-finite objective values are treated as +infinity, so
/// constraints can be expressed by returning infinity.
[[nodiscard]] NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> steps,
                                           const NelderMeadOptions& options = {});

/// Box constraints; lower/upper may be -inf/+inf.
struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;

  [[nodiscard]] bool contains(std::span<const double> x) const;
};

struct MultiStartOptions {
  int restarts = 5;
  std::uint64_t seed = 1;
  /// Relative jitter half-width applied to each coordinate of the start.
  double jitter = 0.1;
  NelderMeadOptions local;
};

struct MultiStartResult {
  NelderMeadResult best;
  std::size_t best_restart = 0;
  std::vector<double> restart_values;
  bool improved_on_start = false;
};

/// Runs `restarts` local searches from independently jittered copies of `x0`
/// and keeps the lowest (f, restart index). Restart i draws its jitter from a
/// stream seeded by (seed, i) only, so results do not depend on how many
/// restarts follow it or in which order they run. Jittered starts are pulled
/// back inside `bounds` when given. Coordinates that are zero are jittered by
/// the same fraction of their step instead.
[[nodiscard]] MultiStartResult multistart_nelder_mead(const Objective& f, const std::vector<double>& x0,
                                                      std::span<const double> steps, const MultiStartOptions& options,
                                                      const Bounds* bounds = nullptr);

/// Deterministic uniform stream for (seed, stream) pairs.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint64_t stream);
  /// Uniform on [0, 1).
  double next();
  /// Uniform on (0, 1).
  double next_open();

 private:
  std::mt19937_64 engine_;
};

}  // namespace housedyn
