#include "housedyn/exploratory.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <limits>

#include "housedyn/error.hpp"

namespace housedyn {

namespace {

struct Moments {
  double mean_x = 0.0, mean_y = 0.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
};

Moments centred_moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.mean_x += x[i];
    m.mean_y += y[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

void check_pairs(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) fail(ErrorKind::kDomain, "samples differ in length");
  if (x.size() < min_n) fail(ErrorKind::kDomain, "need at least " + std::to_string(min_n) + " observations");
}

}  // namespace

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) fail(ErrorKind::kDomain, "degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
  const double x = df / (df + t * t);
  return std::clamp(boost::math::ibeta(df / 2.0, 0.5, x), 0.0, 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y, 2);
  const auto m = centred_moments(x, y);
  if (m.sxx <= 0.0 || m.syy <= 0.0) fail(ErrorKind::kDomain, "degenerate sample");
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

RegressionResult ols_slope_test(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y, 3);
  const auto m = centred_moments(x, y);
  if (m.sxx <= 0.0) fail(ErrorKind::kDomain, "degenerate sample: x is constant");

  RegressionResult r;
  r.n = x.size();
  r.slope = m.sxy / m.sxx;
  r.intercept = m.mean_y - r.slope * m.mean_x;

  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    sse += e * e;
  }
  const double df = static_cast<double>(r.n) - 2.0;
  r.slope_stderr = std::sqrt(sse / df / m.sxx);
  if (r.slope_stderr > 0.0) {
    r.t_stat = r.slope / r.slope_stderr;
  } else {
    r.t_stat = r.slope == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), r.slope);
  }
  r.p_value = student_t_two_sided_p(r.t_stat, df);
  r.r_squared = m.syy > 0.0 ? std::clamp(1.0 - sse / m.syy, 0.0, 1.0) : 1.0;
  return r;
}

DriverScreen screen_driver(const AlignedFrame& frame, const std::string& target, const std::string& driver,
                           const Date& cut) {
  const auto [before, after] = split_at(frame, cut);
  auto run = [&](const AlignedFrame& side) {
    ScreenSide out;
    try {
      const auto& xs = side.column(driver).values;
      const auto& ys = side.column(target).values;
      ScreenResult res;
      res.n = xs.size();
      res.regression = ols_slope_test(xs, ys);
      res.correlation = pearson(xs, ys);
      out.result = res;
    } catch (const Error& e) {
      out.error = e.what();
    }
    return out;
  };
  return DriverScreen{driver, run(before), run(after)};
}

}  // namespace housedyn
