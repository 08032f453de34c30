#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "housedyn/timeseries.hpp"

namespace housedyn {

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;  // two-sided, H0: slope == 0
  double r_squared = 0.0;
  std::size_t n = 0;
};

/// Product-moment correlation. Throws on unequal lengths, n < 2 or a
/// constant sample ("degenerate sample").
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

/// Least-squares line y = intercept + slope * x with a t test on the slope
/// (n - 2 degrees of freedom).
[[nodiscard]] RegressionResult ols_slope_test(std::span<const double> x, std::span<const double> y);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
[[nodiscard]] double student_t_two_sided_p(double t, double df);

struct ScreenResult {
  std::size_t n = 0;
  double correlation = 0.0;
  RegressionResult regression;
};

/// Screening of one driver against the target on one side of the cut. Either
/// a result or the reason it could not be computed.
struct ScreenSide {
  std::optional<ScreenResult> result;
  std::string error;
};

struct DriverScreen {
  std::string driver;
  ScreenSide before_cut;
  ScreenSide after_cut;
};

/// Regresses `target` on `driver` separately for dates before and from `cut`.
[[nodiscard]] DriverScreen screen_driver(const AlignedFrame& frame, const std::string& target,
                                         const std::string& driver, const Date& cut);

}  // namespace housedyn
