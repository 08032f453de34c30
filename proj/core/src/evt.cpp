#include "housedyn/evt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "housedyn/error.hpp"
#include "housedyn/optimize.hpp"

namespace housedyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kXiBound = 0.99;

bool gumbel(double xi) { return std::abs(xi) < kGumbelThreshold; }

std::chrono::year_month month_of(const Date& d) { return {d.year(), d.month()}; }

std::string format_month(std::chrono::year_month ym) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ym.year()), static_cast<unsigned>(ym.month()));
  return buf;
}

// One block's contribution to the negative log-likelihood.
double nll_term(double x, double mu, double sigma, double xi) {
  if (!(sigma > 0.0)) return kInf;
  const double z = (x - mu) / sigma;
  if (gumbel(xi)) return std::log(sigma) + z + std::exp(-z);
  const double t = 1.0 + xi * z;
  if (!(t > 0.0)) return kInf;
  const double lt = std::log1p(xi * z);
  return std::log(sigma) + (1.0 + 1.0 / xi) * lt + std::exp(-lt / xi);
}

// Affine map between the user coefficients and a centred, scaled set that
// the simplex search handles well: location and scale intercepts at the
// covariate means, slopes multiplied by the covariate spread.
struct Reparam {
  double mean_log_rate = 0.0, mean_cpi = 0.0;
  double sd_log_rate = 1.0, sd_cpi = 1.0;
  // Centring shifts an intercept, so it only applies when that intercept is free.
  bool centre_location = true, centre_scale = true;

  Reparam(const BlockMaxima& data, const std::array<bool, 6>& free)
      : centre_location(free[0]), centre_scale(free[3]) {
    const auto n = static_cast<double>(data.blocks.size());
    for (const auto& b : data.blocks) {
      mean_log_rate += std::log(b.rate);
      mean_cpi += b.cpi;
    }
    mean_log_rate /= n;
    mean_cpi /= n;
    double vl = 0.0, vc = 0.0;
    for (const auto& b : data.blocks) {
      vl += std::pow(std::log(b.rate) - mean_log_rate, 2);
      vc += std::pow(b.cpi - mean_cpi, 2);
    }
    sd_log_rate = vl > 0.0 ? std::sqrt(vl / n) : 1.0;
    sd_cpi = vc > 0.0 ? std::sqrt(vc / n) : 1.0;
  }

  [[nodiscard]] std::array<double, 6> forward(const GevCoefficients& c) const {
    const double loc_shift = centre_location ? c.mu1 * mean_log_rate + c.mu2 * mean_cpi : 0.0;
    const double scale_shift = centre_scale ? c.sigma1 * mean_cpi : 0.0;
    return {c.mu0 + loc_shift, c.mu1 * sd_log_rate, c.mu2 * sd_cpi, c.sigma0 + scale_shift, c.sigma1 * sd_cpi, c.xi};
  }

  [[nodiscard]] GevCoefficients backward(const std::array<double, 6>& p) const {
    GevCoefficients c;
    c.mu1 = p[1] / sd_log_rate;
    c.mu2 = p[2] / sd_cpi;
    c.mu0 = p[0] - (centre_location ? c.mu1 * mean_log_rate + c.mu2 * mean_cpi : 0.0);
    c.sigma1 = p[4] / sd_cpi;
    c.sigma0 = p[3] - (centre_scale ? c.sigma1 * mean_cpi : 0.0);
    c.xi = p[5];
    return c;
  }
};

// Columns of the location and scale design restricted to free slopes; a rank
// below the column count means some coefficients are not identifiable.
bool design_rank_deficient(const BlockMaxima& data, const std::array<bool, 6>& free) {
  const auto n = static_cast<Eigen::Index>(data.blocks.size());
  auto rank_short = [&](const std::vector<int>& which) {
    if (which.empty()) return false;
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(which.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& b = data.blocks[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < which.size(); ++k) {
        double v = 1.0;
        if (which[k] == 1) v = std::log(b.rate);
        if (which[k] == 2) v = b.cpi;
        design(i, static_cast<Eigen::Index>(k)) = v;
      }
    }
    // Standardise columns so the rank threshold is scale free.
    for (Eigen::Index k = 0; k < design.cols(); ++k) {
      const double norm = design.col(k).norm();
      if (norm > 0.0) design.col(k) /= norm;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    return qr.rank() < design.cols();
  };
  std::vector<int> location, scale;
  if (free[0]) location.push_back(0);
  if (free[1]) location.push_back(1);
  if (free[2]) location.push_back(2);
  if (free[3]) scale.push_back(0);
  if (free[4]) scale.push_back(2);
  return rank_short(location) || rank_short(scale);
}

// Standard errors from the inverse central-difference Hessian of the nll.
// Differences are taken in the centred coordinates of `reparam`, with steps
// proportional to the typical scale, and the covariance is mapped back
// through the (linear) inverse transform.
std::optional<std::array<double, 6>> hessian_stderrs(const GevCoefficients& at, const BlockMaxima& data,
                                                     const std::array<bool, 6>& free, const Reparam& reparam) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < 6; ++j) {
    if (free[j]) idx.push_back(j);
  }
  const auto theta = reparam.forward(at);
  auto f = [&](const std::array<double, 6>& p) { return nll(reparam.backward(p), data); };
  const double f0 = f(theta);
  const auto m = static_cast<Eigen::Index>(idx.size());

  double typical_scale = 0.0;
  for (const auto& b : data.blocks) typical_scale += at.scale(b.cpi);
  typical_scale = std::max(typical_scale / static_cast<double>(data.blocks.size()), 1e-8);
  std::array<double, 6> step{};
  step.fill(1e-3 * typical_scale);
  step[5] = 1e-3;

  Eigen::MatrixXd h(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto i = idx[static_cast<std::size_t>(a)];
    auto plus = theta, minus = theta;
    plus[i] += step[i];
    minus[i] -= step[i];
    h(a, a) = (f(plus) - 2.0 * f0 + f(minus)) / (step[i] * step[i]);
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const auto j = idx[static_cast<std::size_t>(b)];
      auto pp = theta, pm = theta, mp = theta, mm = theta;
      pp[i] += step[i], pp[j] += step[j];
      pm[i] += step[i], pm[j] -= step[j];
      mp[i] -= step[i], mp[j] += step[j];
      mm[i] -= step[i], mm[j] -= step[j];
      h(a, b) = h(b, a) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step[i] * step[j]);
    }
  }
  if (!h.allFinite()) return std::nullopt;
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd cov_centred = llt.solve(Eigen::MatrixXd::Identity(m, m));

  // Jacobian of backward() restricted to the free coordinates.
  const auto origin = reparam.backward({}).to_array();
  Eigen::MatrixXd jac(m, m);
  for (Eigen::Index b = 0; b < m; ++b) {
    std::array<double, 6> unit{};
    unit[idx[static_cast<std::size_t>(b)]] = 1.0;
    const auto col = reparam.backward(unit).to_array();
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto i = idx[static_cast<std::size_t>(a)];
      jac(a, b) = col[i] - origin[i];
    }
  }
  const Eigen::MatrixXd cov = jac * cov_centred * jac.transpose();
  std::array<double, 6> se{};
  for (Eigen::Index a = 0; a < m; ++a) {
    const double v = cov(a, a);
    if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
    se[idx[static_cast<std::size_t>(a)]] = std::sqrt(v);
  }
  return se;
}

}  // namespace

double gev_cdf(double x, double mu, double sigma, double xi) {
  if (!(sigma > 0.0)) fail(ErrorKind::kDomain, "gev_cdf: sigma must be positive");
  const double z = (x - mu) / sigma;
  if (gumbel(xi)) return std::exp(-std::exp(-z));
  const double t = 1.0 + xi * z;
  if (!(t > 0.0)) return xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(xi * z) / xi));
}

double gev_pdf(double x, double mu, double sigma, double xi) {
  if (!(sigma > 0.0)) fail(ErrorKind::kDomain, "gev_pdf: sigma must be positive");
  const double z = (x - mu) / sigma;
  if (gumbel(xi)) return std::exp(-z - std::exp(-z)) / sigma;
  const double t = 1.0 + xi * z;
  if (!(t > 0.0)) return 0.0;
  const double lt = std::log1p(xi * z);
  return std::exp(-(1.0 + 1.0 / xi) * lt - std::exp(-lt / xi)) / sigma;
}

double gev_quantile(double p, double mu, double sigma, double xi) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::kDomain, "gev_quantile: p must lie in (0, 1)");
  if (!(sigma > 0.0)) fail(ErrorKind::kDomain, "gev_quantile: sigma must be positive");
  const double y = -std::log(p);
  if (gumbel(xi)) return mu - sigma * std::log(y);
  return mu + sigma * std::expm1(-xi * std::log(y)) / xi;
}

BlockMaxima block_maxima(const TimeSeries& daily, const AlignedFrame& covariates, std::size_t min_block_size) {
  if (daily.frequency() != Frequency::kDaily) fail(ErrorKind::kDomain, "block_maxima: series must be daily");
  if (covariates.frequency != Frequency::kMonthly) fail(ErrorKind::kDomain, "block_maxima: covariates must be monthly");
  const auto& cpi = covariates.column("cpi").values;
  const auto& rate = covariates.column("rate").values;

  std::map<std::chrono::year_month, std::size_t> row_of;
  for (std::size_t i = 0; i < covariates.dates.size(); ++i) row_of[month_of(covariates.dates[i])] = i;

  BlockMaxima out;
  std::vector<std::string> missing;
  const auto pts = daily.points();
  std::size_t i = 0;
  while (i < pts.size()) {
    const auto period = month_of(pts[i].date);
    double mx = pts[i].value;
    std::size_t j = i;
    while (j < pts.size() && month_of(pts[j].date) == period) mx = std::max(mx, pts[j++].value);
    const std::size_t count = j - i;
    i = j;

    const auto row = row_of.find(period);
    if (row == row_of.end()) {
      missing.push_back(format_month(period));
      continue;
    }
    if (count < min_block_size) {
      out.dropped.push_back({period, count});
      continue;
    }
    const double r = rate[row->second];
    if (!(r > 0.0)) fail(ErrorKind::kDomain, "block_maxima: non-positive rate in " + format_month(period));
    out.blocks.push_back({period, mx, cpi[row->second], r, count});
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    fail(ErrorKind::kValidation, "block_maxima: no covariates for month(s) " + list);
  }
  return out;
}

std::string block_maxima_csv(const BlockMaxima& data) {
  std::string out = "month,max_value,cpi,rate,n_obs\n";
  for (const auto& b : data.blocks) {
    out += format_month(b.period) + ',' + format_double(b.max_value) + ',' + format_double(b.cpi) + ',' +
           format_double(b.rate) + ',' + std::to_string(b.n_obs) + '\n';
  }
  return out;
}

const std::array<std::string, 6>& gev_coefficient_names() {
  static const std::array<std::string, 6> names{"mu0", "mu1", "mu2", "sigma0", "sigma1", "xi"};
  return names;
}

double nll(const GevCoefficients& c, const BlockMaxima& data) {
  double total = 0.0;
  for (const auto& b : data.blocks) {
    total += nll_term(b.max_value, c.location(b.rate, b.cpi), c.scale(b.cpi), c.xi);
    if (!std::isfinite(total)) return kInf;
  }
  return total;
}

std::vector<double> pit(const GevCoefficients& c, const BlockMaxima& data) {
  std::vector<double> u;
  u.reserve(data.blocks.size());
  for (const auto& b : data.blocks) u.push_back(gev_cdf(b.max_value, c.location(b.rate, b.cpi), c.scale(b.cpi), c.xi));
  return u;
}

GevCoefficients moment_start(const BlockMaxima& data) {
  if (data.blocks.size() < 2) fail(ErrorKind::kDomain, "moment_start: need at least two blocks");
  double mean = 0.0;
  for (const auto& b : data.blocks) mean += b.max_value;
  mean /= static_cast<double>(data.blocks.size());
  double var = 0.0;
  for (const auto& b : data.blocks) var += (b.max_value - mean) * (b.max_value - mean);
  var /= static_cast<double>(data.blocks.size() - 1);
  const double scale = std::max(std::sqrt(6.0 * var) / 3.141592653589793, 1e-6);
  GevCoefficients c;
  c.sigma0 = scale;
  c.mu0 = mean - 0.5772156649015329 * scale;
  c.xi = 0.1;
  return c;
}

GevModel fit_gev(const BlockMaxima& data, const GevCoefficients& init, const GevFitOptions& options) {
  if (data.blocks.size() < options.min_blocks) {
    fail(ErrorKind::kDomain, "fit_gev: need at least " + std::to_string(options.min_blocks) + " blocks, got " +
                                 std::to_string(data.blocks.size()));
  }
  if (std::abs(init.xi) >= kXiBound) fail(ErrorKind::kDomain, "fit_gev: initial shape outside (-0.99, 0.99)");

  const Reparam reparam(data, options.free);
  const auto start_full = reparam.forward(init);
  std::vector<int> free_idx;
  for (int j = 0; j < 6; ++j) {
    if (options.free[static_cast<std::size_t>(j)]) free_idx.push_back(j);
  }
  if (free_idx.empty()) fail(ErrorKind::kDomain, "fit_gev: no free coefficients");

  const auto expand = [&](std::span<const double> v) {
    auto full = start_full;
    for (std::size_t k = 0; k < free_idx.size(); ++k) full[static_cast<std::size_t>(free_idx[k])] = v[k];
    return reparam.backward(full);
  };
  const Objective objective = [&](std::span<const double> v) {
    const auto c = expand(v);
    if (std::abs(c.xi) >= kXiBound) return kInf;
    return nll(c, data);
  };

  // Initial simplex edges in the centred space.
  const double location_step = std::max(0.5 * std::abs(start_full[3]), 1e-3);
  const std::array<double, 6> full_steps{location_step, location_step, location_step,
                                         std::max(0.2 * std::abs(start_full[3]), 1e-3),
                                         std::max(0.1 * std::abs(start_full[3]), 1e-3), 0.1};
  std::vector<double> x0, steps;
  for (int j : free_idx) {
    x0.push_back(start_full[static_cast<std::size_t>(j)]);
    steps.push_back(full_steps[static_cast<std::size_t>(j)]);
  }

  MultiStartOptions ms;
  ms.restarts = options.restarts;
  ms.seed = options.seed;
  ms.local.max_iter = options.max_iter;
  ms.local.f_tol = options.tolerance;
  const auto result = multistart_nelder_mead(objective, x0, steps, ms);

  GevModel model;
  model.coefficients = expand(result.best.x);
  model.nll = result.best.f;
  model.n_blocks = data.blocks.size();
  model.free = options.free;
  model.converged = result.best.converged && std::isfinite(result.best.f);
  if (!model.converged) model.warnings.emplace_back("optimizer did not converge");

  model.rank_deficient = design_rank_deficient(data, options.free);
  if (model.rank_deficient) model.warnings.emplace_back("covariate design is rank deficient; slopes not identifiable");

  if (std::isfinite(model.nll)) {
    model.stderrs = hessian_stderrs(model.coefficients, data, options.free, reparam);
    if (!model.stderrs) model.warnings.emplace_back("Hessian not positive definite; standard errors unavailable");
    model.diagnostics = gof(model.coefficients, data);
  }
  return model;
}

}  // namespace housedyn
