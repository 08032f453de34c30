#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "housedyn/error.hpp"
#include "housedyn/evt.hpp"

namespace housedyn {

double ks_uniform_statistic(std::span<const double> u) {
  if (u.empty()) fail(ErrorKind::kDomain, "KS statistic of an empty sample");
  std::vector<double> sorted(u.begin(), u.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto di = static_cast<double>(i);
    d = std::max({d, (di + 1.0) / n - sorted[i], sorted[i] - di / n});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0) fail(ErrorKind::kDomain, "KS p-value needs n >= 1");
  const double rn = std::sqrt(static_cast<double>(n));
  const double lambda = (rn + 0.12 + 0.11 / rn) * d;
  if (lambda <= 0.0) return 1.0;
  constexpr double pi = std::numbers::pi;
  double p = 0.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series, fast for small lambda.
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double j = 2.0 * k - 1.0;
      sum += std::exp(-j * j * pi * pi / (8.0 * lambda * lambda));
    }
    p = 1.0 - std::sqrt(2.0 * pi) / lambda * sum;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      p += (k % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-18) break;
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

double ad_uniform_statistic(std::span<const double> u) {
  if (u.empty()) fail(ErrorKind::kDomain, "AD statistic of an empty sample");
  std::vector<double> sorted(u.begin(), u.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 * static_cast<double>(i + 1) - 1.0;
    sum += w * (std::log(sorted[i]) + std::log1p(-sorted[n - 1 - i]));
  }
  const double a2 = -static_cast<double>(n) - sum / static_cast<double>(n);
  return std::isnan(a2) ? std::numeric_limits<double>::infinity() : a2;
}

double ad_pvalue(double a2) {
  if (std::isnan(a2)) return std::numeric_limits<double>::quiet_NaN();
  if (a2 <= 0.0) return 1.0;
  if (std::isinf(a2)) return 0.0;
  // Limiting distribution function of A^2 (Marsaglia & Marsaglia, 2004).
  double cdf = 0.0;
  if (a2 < 2.0) {
    const double z = a2;
    cdf = std::exp(-1.2337141 / z) / std::sqrt(z) *
          (2.00012 + (0.247105 - (0.0649821 - (0.0347962 - (0.0116720 - 0.00168691 * z) * z) * z) * z) * z);
  } else {
    const double z = a2;
    cdf = std::exp(-std::exp(1.0776 - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z));
  }
  return std::clamp(1.0 - cdf, 0.0, 1.0);
}

GofResult gof_uniform(std::span<const double> u) {
  GofResult r;
  r.ks_stat = ks_uniform_statistic(u);
  r.ks_p = ks_pvalue(r.ks_stat, u.size());
  r.ad_stat = ad_uniform_statistic(u);
  r.ad_p = ad_pvalue(r.ad_stat);
  return r;
}

GofResult gof(const GevCoefficients& c, const BlockMaxima& data) { return gof_uniform(pit(c, data)); }

double lr_test(double nested_nll, double full_nll, int df) {
  if (df < 1) fail(ErrorKind::kDomain, "likelihood ratio test needs df >= 1");
  if (nested_nll < full_nll - 1e-9) fail(ErrorKind::kDomain, "models not nested or misfit");
  const double deviance = std::max(0.0, 2.0 * (nested_nll - full_nll));
  return boost::math::gamma_q(0.5 * df, 0.5 * deviance);
}

}  // namespace housedyn
