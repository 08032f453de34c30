#include "housedyn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "housedyn/error.hpp"

namespace housedyn {

namespace {

constexpr double kTailProbability = 1e-4;

void check_offset_inputs(const GevCoefficients& c, double baseline_rate) {
  if (!(baseline_rate > 0.0)) fail(ErrorKind::kDomain, "baseline rate must be positive");
  if (!(c.mu1 < 0.0)) fail(ErrorKind::kDomain, "rate has no moderating effect (mu1 >= 0)");
}

}  // namespace

std::string_view to_string(ShiftDirection d) {
  switch (d) {
    case ShiftDirection::kLeftward: return "leftward";
    case ShiftDirection::kRightward: return "rightward";
    case ShiftDirection::kNull: return "null";
  }
  return "null";
}

double location_shift(const GevCoefficients& c, double baseline_rate, double d_rate, double d_cpi) {
  if (!(baseline_rate > 0.0)) fail(ErrorKind::kDomain, "baseline rate must be positive");
  if (!(baseline_rate + d_rate > 0.0)) fail(ErrorKind::kDomain, "shifted rate must be positive");
  return c.mu1 * std::log1p(d_rate / baseline_rate) + c.mu2 * d_cpi;
}

ScenarioResult shift(const GevCoefficients& c, double baseline_rate, double baseline_cpi, double d_rate,
                     double d_cpi) {
  ScenarioResult r;
  r.baseline_rate = baseline_rate;
  r.baseline_cpi = baseline_cpi;
  r.d_rate = d_rate;
  r.d_cpi = d_cpi;
  r.d_mu = location_shift(c, baseline_rate, d_rate, d_cpi);
  r.d_sigma = c.sigma1 * d_cpi;
  if (r.d_mu > kDirectionTolerance) {
    r.direction = ShiftDirection::kRightward;
  } else if (r.d_mu < -kDirectionTolerance) {
    r.direction = ShiftDirection::kLeftward;
  }

  r.baseline = {c.location(baseline_rate, baseline_cpi), c.scale(baseline_cpi), c.xi};
  r.shifted = {r.baseline.mu + r.d_mu, r.baseline.sigma + r.d_sigma, c.xi};
  if (!(r.baseline.sigma > 0.0)) fail(ErrorKind::kDomain, "baseline scale is not positive");
  if (!(r.shifted.sigma > 0.0)) fail(ErrorKind::kDomain, "shifted scale is not positive");

  const auto q = [](const GevParams& p, double prob) { return gev_quantile(prob, p.mu, p.sigma, p.xi); };
  const double lo = std::min(q(r.baseline, kTailProbability), q(r.shifted, kTailProbability));
  const double hi = std::max(q(r.baseline, 1.0 - kTailProbability), q(r.shifted, 1.0 - kTailProbability));
  r.density_grid.reserve(kDensityGridPoints);
  for (std::size_t i = 0; i < kDensityGridPoints; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kDensityGridPoints - 1);
    r.density_grid.push_back({x, gev_pdf(x, r.baseline.mu, r.baseline.sigma, r.baseline.xi),
                              gev_pdf(x, r.shifted.mu, r.shifted.sigma, r.shifted.xi)});
  }
  return r;
}

double offsetting_rate_increase_bisection(const GevCoefficients& c, double baseline_rate, double d_cpi,
                                          double tolerance) {
  check_offset_inputs(c, baseline_rate);
  const auto d_mu = [&](double d_rate) { return location_shift(c, baseline_rate, d_rate, d_cpi); };
  if (d_mu(0.0) <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = baseline_rate;
  while (d_mu(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) fail(ErrorKind::kNumerical, "no offsetting rate increase found");
  }
  while (hi - lo > tolerance * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    (d_mu(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

double offsetting_rate_increase(const GevCoefficients& c, double baseline_rate, double d_cpi) {
  check_offset_inputs(c, baseline_rate);
  if (!(c.mu2 * d_cpi > 0.0)) return 0.0;
  const double closed = baseline_rate * std::expm1(-c.mu2 * d_cpi / c.mu1);
  const double bisected = offsetting_rate_increase_bisection(c, baseline_rate, d_cpi, 1e-12);
  if (std::abs(closed - bisected) > 1e-8 * (1.0 + std::abs(closed))) {
    std::ostringstream msg;
    msg << "offsetting rate: closed form " << closed << " disagrees with bisection " << bisected;
    fail(ErrorKind::kNumerical, msg.str());
  }
  return closed;
}

std::string density_csv(const ScenarioResult& result) {
  std::string out = "x,baseline,shifted\n";
  for (const auto& p : result.density_grid) {
    out += format_double(p.x) + ',' + format_double(p.baseline) + ',' + format_double(p.shifted) + '\n';
  }
  return out;
}

}  // namespace housedyn
