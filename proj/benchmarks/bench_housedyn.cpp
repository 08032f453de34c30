#include <benchmark/benchmark.h>

#include <cmath>

#include "housedyn/dynamics.hpp"
#include "housedyn/evt.hpp"
#include "housedyn/optimize.hpp"
#include "housedyn/synthetic.hpp"

namespace {

using namespace housedyn;

std::vector<Block> monthly_layout(std::size_t n) {
  std::vector<Block> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto m = static_cast<unsigned>(i % 12 + 1);
    const int y = 2021 + static_cast<int>(i / 12);
    const double s = static_cast<double>(i);
    out.push_back({std::chrono::year{y} / std::chrono::month{m}, 0.0, 120.0 + 0.3 * s, 3.0 + 2.0 * std::sin(s / 9.0), 21});
  }
  return out;
}

const GevCoefficients kCoefficients{-17.92, -2.75, 0.20, 0.46, 0.0, 0.0};

void BM_Simulate(benchmark::State& state) {
  const double t_end = static_cast<double>(state.range(0));
  const RatePath path({{0.0, 7.8}, {t_end / 2.0, 2.0}, {t_end, 6.5}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate({0.0, 485.9, 400.0, 200.0}, path, OdeParams{}, t_end));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t_end / 0.05));
}
BENCHMARK(BM_Simulate)->Arg(10)->Arg(60)->Arg(240);

void BM_GevNll(benchmark::State& state) {
  const auto layout = monthly_layout(static_cast<std::size_t>(state.range(0)));
  const auto data = sample_blocks(kCoefficients, layout, 1);
  GevCoefficients c = kCoefficients;
  c.xi = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(nll(c, data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GevNll)->Arg(60)->Arg(600);

void BM_FitGev(benchmark::State& state) {
  const auto layout = monthly_layout(60);
  const auto data = sample_blocks(kCoefficients, layout, 1);
  GevFitOptions options;
  options.restarts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gev(data, moment_start(data), options));
}
BENCHMARK(BM_FitGev)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_NelderMeadRosenbrock(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Objective rosenbrock = [](std::span<const double> x) {
    double f = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      f += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
    }
    return f;
  };
  const std::vector<double> x0(n, -1.0), steps(n, 0.5);
  NelderMeadOptions options;
  options.max_iter = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(nelder_mead(rosenbrock, x0, steps, options));
}
BENCHMARK(BM_NelderMeadRosenbrock)->Arg(2)->Arg(6)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
