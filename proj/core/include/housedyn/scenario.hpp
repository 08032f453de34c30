#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "housedyn/evt.hpp"

namespace housedyn {

enum class ShiftDirection { kLeftward, kRightward, kNull };

[[nodiscard]] std::string_view to_string(ShiftDirection d);

/// |d_mu| at or below this is reported as no shift.
inline constexpr double kDirectionTolerance = 1e-9;
inline constexpr std::size_t kDensityGridPoints = 512;

struct GevParams {
  double mu = 0.0;
  double sigma = 1.0;
  double xi = 0.0;
};

struct DensityPoint {
  double x;
  double baseline;
  double shifted;
};

struct ScenarioResult {
  double baseline_rate = 0.0;
  double baseline_cpi = 0.0;
  double d_rate = 0.0;
  double d_cpi = 0.0;
  double d_mu = 0.0;
  double d_sigma = 0.0;
  ShiftDirection direction = ShiftDirection::kNull;
  GevParams baseline;
  GevParams shifted;
  std::vector<DensityPoint> density_grid;
};

/// Location change mu1 * ln((rate + d_rate) / rate) + mu2 * d_cpi.
[[nodiscard]] double location_shift(const GevCoefficients& c, double baseline_rate, double d_rate, double d_cpi);

/// Baseline and shifted extreme-price distributions under a change in
/// mortgage rate and CPI. The density grid spans the 0.01% to 99.99%
/// quantiles of both distributions.
[[nodiscard]] ScenarioResult shift(const GevCoefficients& c, double baseline_rate, double baseline_cpi, double d_rate,
                                   double d_cpi);

/// Smallest rate increase whose location effect cancels a CPI change:
/// baseline_rate * (exp(-mu2 * d_cpi / mu1) - 1). Zero when the CPI change
/// does not raise the location. Cross-checked against
/// offsetting_rate_increase_bisection; throws if mu1 >= 0.
[[nodiscard]] double offsetting_rate_increase(const GevCoefficients& c, double baseline_rate, double d_cpi);

/// The same threshold found by bisection on location_shift, to `tolerance`.
[[nodiscard]] double offsetting_rate_increase_bisection(const GevCoefficients& c, double baseline_rate, double d_cpi,
                                                        double tolerance = 1e-10);

/// `x,baseline,shifted` rows.
[[nodiscard]] std::string density_csv(const ScenarioResult& result);

}  // namespace housedyn
