#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "housedyn/calibration.hpp"
#include "housedyn/dynamics.hpp"
#include "housedyn/timeseries.hpp"

namespace housedyn::cli {

struct SeriesSpec {
  std::string name;
  std::filesystem::path path;
  Frequency frequency = Frequency::kQuarterly;
  ResampleMethod resample = ResampleMethod::kMean;
};

struct DateWindow {
  std::optional<Date> from;
  std::optional<Date> to;
};

struct GevWindow {
  std::string name;
  Date from;
  Date to;
};

struct RunConfig {
  std::optional<SeriesSpec> price;         // quarterly dwelling value
  std::optional<SeriesSpec> rate;          // quarterly mortgage rate
  std::vector<SeriesSpec> drivers;         // screened against price
  std::optional<SeriesSpec> daily_price;   // daily series for block maxima
  std::optional<SeriesSpec> cpi;           // monthly
  std::optional<SeriesSpec> rate_monthly;  // monthly

  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  Date cut_date{std::chrono::year{2020}, std::chrono::month{1}, std::chrono::day{1}};

  OdeParams model;
  std::optional<double> y0;
  double s0 = 400.0;
  double d0 = 200.0;

  DateWindow simulate_window;
  double dt = 0.05;

  DateWindow logistic_window;
  LogisticCurve logistic_init;
  int logistic_restarts = 5;

  DateWindow ode_window;
  std::vector<std::string> ode_free{"k", "c"};
  std::map<std::string, Interval> ode_bounds;
  int ode_restarts = 5;

  std::vector<GevWindow> gev_windows;
  std::size_t min_block_size = 10;
  std::size_t min_blocks = 30;
  int gev_restarts = 10;

  std::optional<std::filesystem::path> scenario_model;
  std::optional<double> baseline_rate;
  std::optional<double> baseline_cpi;
  std::optional<double> d_rate;
  std::optional<double> d_cpi;
};

/// Reads a JSON run configuration. Relative paths resolve against the
/// directory holding the file. Throws housedyn::Error(kValidation) on unknown
/// keys or malformed values.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Defaults used when no configuration file is given.
[[nodiscard]] RunConfig default_config();

}  // namespace housedyn::cli
