#include "housedyn/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "housedyn/error.hpp"

namespace housedyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, std::span<const double> x, int& evaluations) {
  ++evaluations;
  const double v = f(x);
  return std::isfinite(v) ? v : kInf;
}

struct Simplex {
  std::vector<std::vector<double>> x;
  std::vector<double> f;

  void sort() {
    std::vector<std::size_t> order(f.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    std::vector<std::vector<double>> xs;
    std::vector<double> fs;
    for (auto i : order) {
      xs.push_back(std::move(x[i]));
      fs.push_back(f[i]);
    }
    x = std::move(xs);
    f = std::move(fs);
  }
};

bool simplex_converged(const Simplex& s, const NelderMeadOptions& o) {
  const double fb = s.f.front();
  const double fw = s.f.back();
  if (!std::isfinite(fw) || fw - fb > o.f_tol * (1.0 + std::abs(fb))) return false;
  const auto& best = s.x.front();
  for (std::size_t v = 1; v < s.x.size(); ++v) {
    for (std::size_t j = 0; j < best.size(); ++j) {
      if (std::abs(s.x[v][j] - best[j]) > o.x_tol * (1.0 + std::abs(best[j]))) return false;
    }
  }
  return true;
}

Simplex build_simplex(const Objective& f, const std::vector<double>& x0, std::span<const double> steps,
                      int& evaluations) {
  const std::size_t n = x0.size();
  Simplex s;
  s.x.push_back(x0);
  s.f.push_back(safe_eval(f, x0, evaluations));
  for (std::size_t j = 0; j < n; ++j) {
    auto v = x0;
    v[j] += steps[j];
    s.f.push_back(safe_eval(f, v, evaluations));
    s.x.push_back(std::move(v));
  }
  s.sort();
  return s;
}

// Runs simplex iterations until convergence or the iteration budget is spent.
bool iterate(const Objective& f, Simplex& s, int max_iter, const NelderMeadOptions& o, int& iterations,
             int& evaluations) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const std::size_t n = s.x.front().size();
  std::vector<double> centroid(n), trial(n), trial2(n);

  auto combine = [&](std::vector<double>& out, double coeff) {
    // centroid + coeff * (centroid - worst)
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coeff * (centroid[j] - s.x[n][j]);
  };

  while (iterations < max_iter) {
    if (simplex_converged(s, o)) return true;
    ++iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += s.x[v][j];
    }
    for (auto& c : centroid) c /= static_cast<double>(n);

    combine(trial, kReflect);
    const double fr = safe_eval(f, trial, evaluations);
    if (fr < s.f[0]) {
      combine(trial2, kExpand);
      const double fe = safe_eval(f, trial2, evaluations);
      if (fe < fr) {
        s.x[n] = trial2;
        s.f[n] = fe;
      } else {
        s.x[n] = trial;
        s.f[n] = fr;
      }
    } else if (fr < s.f[n - 1]) {
      s.x[n] = trial;
      s.f[n] = fr;
    } else {
      const bool outside = fr < s.f[n];
      combine(trial2, outside ? kContract : -kContract);
      const double fc = safe_eval(f, trial2, evaluations);
      if (fc < (outside ? fr : s.f[n])) {
        s.x[n] = trial2;
        s.f[n] = fc;
      } else {
        for (std::size_t v = 1; v <= n; ++v) {
          for (std::size_t j = 0; j < n; ++j) s.x[v][j] = s.x[0][j] + kShrink * (s.x[v][j] - s.x[0][j]);
          s.f[v] = safe_eval(f, s.x[v], evaluations);
        }
      }
    }
    s.sort();
  }
  return simplex_converged(s, o);
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options) {
  if (x0.empty()) fail(ErrorKind::kDomain, "nelder_mead: empty parameter vector");
  if (steps.size() != x0.size()) fail(ErrorKind::kDomain, "nelder_mead: step count does not match dimension");

  NelderMeadResult r;
  Simplex s = build_simplex(f, x0, steps, r.evaluations);
  r.converged = iterate(f, s, options.max_iter, options, r.iterations, r.evaluations);

  for (int k = 0; k < options.rebuilds && r.converged && r.iterations < options.max_iter; ++k) {
    const double before = s.f.front();
    // Rebuild around the optimum with edges no larger than the original ones.
    std::vector<double> local(steps.begin(), steps.end());
    for (std::size_t j = 0; j < local.size(); ++j) {
      local[j] = std::copysign(std::max(std::abs(local[j]) * 1e-2, 1e-4 * (1.0 + std::abs(s.x.front()[j]))),
                               local[j]);
    }
    Simplex fresh = build_simplex(f, s.x.front(), local, r.evaluations);
    r.converged = iterate(f, fresh, options.max_iter, options, r.iterations, r.evaluations);
    const bool improved = fresh.f.front() < before - options.f_tol * (1.0 + std::abs(before));
    if (fresh.f.front() <= before) s = std::move(fresh);
    if (!improved) break;
  }

  r.x = s.x.front();
  r.f = s.f.front();
  return r;
}

bool Bounds::contains(std::span<const double> x) const {
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (j < lower.size() && x[j] < lower[j]) return false;
    if (j < upper.size() && x[j] > upper[j]) return false;
  }
  return true;
}

UniformStream::UniformStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

double UniformStream::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double UniformStream::next_open() {
  double u = 0.0;
  while (u == 0.0) u = next();
  return u;
}

MultiStartResult multistart_nelder_mead(const Objective& f, const std::vector<double>& x0,
                                        std::span<const double> steps, const MultiStartOptions& options,
                                        const Bounds* bounds) {
  if (options.restarts < 1) fail(ErrorKind::kDomain, "multistart: at least one restart required");
  int evals = 0;
  const double f_start = safe_eval(f, x0, evals);

  MultiStartResult out;
  for (int i = 0; i < options.restarts; ++i) {
    UniformStream rng(options.seed, static_cast<std::uint64_t>(i));
    std::vector<double> start = x0;
    for (std::size_t j = 0; j < start.size(); ++j) {
      const double u = 2.0 * rng.next() - 1.0;
      const double scale = start[j] != 0.0 ? std::abs(start[j]) : std::abs(steps[j]);
      start[j] += options.jitter * u * scale;
      if (bounds != nullptr) {
        if (j < bounds->lower.size()) start[j] = std::max(start[j], bounds->lower[j]);
        if (j < bounds->upper.size()) start[j] = std::min(start[j], bounds->upper[j]);
      }
    }
    auto local = nelder_mead(f, std::move(start), steps, options.local);
    out.restart_values.push_back(local.f);
    if (i == 0 || local.f < out.best.f) {
      out.best = std::move(local);
      out.best_restart = static_cast<std::size_t>(i);
    }
  }
  out.improved_on_start = out.best.f < f_start;
  return out;
}

}  // namespace housedyn
