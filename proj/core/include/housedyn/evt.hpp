#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "housedyn/timeseries.hpp"

namespace housedyn {

/// |xi| below this uses the Gumbel limit.
inline constexpr double kGumbelThreshold = 1e-6;

[[nodiscard]] double gev_cdf(double x, double mu, double sigma, double xi);
[[nodiscard]] double gev_pdf(double x, double mu, double sigma, double xi);
/// Inverse of gev_cdf; p must lie in (0, 1).
[[nodiscard]] double gev_quantile(double p, double mu, double sigma, double xi);

struct Block {
  std::chrono::year_month period;
  double max_value = 0.0;
  double cpi = 0.0;   // index points
  double rate = 0.0;  // mortgage rate, percent
  std::size_t n_obs = 0;
};

struct DroppedBlock {
  std::chrono::year_month period;
  std::size_t n_obs = 0;
};

struct BlockMaxima {
  std::vector<Block> blocks;
  std::vector<DroppedBlock> dropped;  // months below the minimum block size
};

/// Monthly maxima of a daily series joined with that month's `cpi` and
/// `rate` columns from a monthly frame. Months with fewer than
/// `min_block_size` observations are dropped and listed. Throws if any month
/// of the series has no covariate row, or if a rate is not positive.
[[nodiscard]] BlockMaxima block_maxima(const TimeSeries& daily, const AlignedFrame& monthly_covariates,
                                       std::size_t min_block_size = 10);

/// Writes `month,max_value,cpi,rate,n_obs`.
[[nodiscard]] std::string block_maxima_csv(const BlockMaxima& data);

/// Location mu = mu0 + mu1 * ln(rate) + mu2 * cpi, scale
/// sigma = sigma0 + sigma1 * cpi, constant shape xi.
struct GevCoefficients {
  double mu0 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma0 = 1.0;
  double sigma1 = 0.0;
  double xi = 0.0;

  [[nodiscard]] double location(double rate, double cpi) const { return mu0 + mu1 * std::log(rate) + mu2 * cpi; }
  [[nodiscard]] double scale(double cpi) const { return sigma0 + sigma1 * cpi; }

  [[nodiscard]] std::array<double, 6> to_array() const { return {mu0, mu1, mu2, sigma0, sigma1, xi}; }
  static GevCoefficients from_array(std::span<const double, 6> v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

  friend bool operator==(const GevCoefficients&, const GevCoefficients&) = default;
};

[[nodiscard]] const std::array<std::string, 6>& gev_coefficient_names();

/// Negative log-likelihood of the block maxima. Returns +inf when any block
/// has a non-positive scale or lies outside the support.
[[nodiscard]] double nll(const GevCoefficients& c, const BlockMaxima& data);

struct GofResult {
  double ks_stat = 0.0;
  double ks_p = 0.0;
  double ad_stat = 0.0;
  double ad_p = 0.0;
};

struct GevModel {
  GevCoefficients coefficients;
  std::optional<std::array<double, 6>> stderrs;  // absent when the Hessian is not positive definite
  double nll = 0.0;
  GofResult diagnostics;
  std::size_t n_blocks = 0;
  std::array<bool, 6> free{true, true, true, true, true, true};
  bool converged = false;
  bool rank_deficient = false;
  std::vector<std::string> warnings;
};

struct GevFitOptions {
  int restarts = 10;
  std::uint64_t seed = 1;
  int max_iter = 4000;
  double tolerance = 1e-10;
  /// Coefficients held at their initial value when false.
  std::array<bool, 6> free{true, true, true, true, true, true};
  std::size_t min_blocks = 30;
};

/// Maximum-likelihood fit by multi-start Nelder-Mead, with standard errors
/// from a central-difference Hessian and PIT diagnostics.
[[nodiscard]] GevModel fit_gev(const BlockMaxima& data, const GevCoefficients& init,
                               const GevFitOptions& options = {});

/// Stationary Gumbel moment estimates with zero covariate effects and a small
/// positive shape; a reasonable starting point for fit_gev.
[[nodiscard]] GevCoefficients moment_start(const BlockMaxima& data);

/// Probability-integral transform of each block under the model.
[[nodiscard]] std::vector<double> pit(const GevCoefficients& c, const BlockMaxima& data);

/// Kolmogorov-Smirnov distance of a sample from Uniform(0, 1).
[[nodiscard]] double ks_uniform_statistic(std::span<const double> u);
/// Asymptotic Kolmogorov tail probability with the small-sample correction
/// lambda = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) * d.
[[nodiscard]] double ks_pvalue(double d, std::size_t n);
/// Anderson-Darling A^2 of a sample against Uniform(0, 1).
[[nodiscard]] double ad_uniform_statistic(std::span<const double> u);
/// Upper tail of the limiting A^2 distribution for a fully specified null.
[[nodiscard]] double ad_pvalue(double a2);

[[nodiscard]] GofResult gof_uniform(std::span<const double> u);
[[nodiscard]] GofResult gof(const GevCoefficients& c, const BlockMaxima& data);

/// Likelihood-ratio p-value: chi-square(df) upper tail at
/// 2 * (nested_nll - full_nll).
[[nodiscard]] double lr_test(double nested_nll, double full_nll, int df);

}  // namespace housedyn
