#include "housedyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "housedyn/error.hpp"

namespace housedyn {

namespace {

// log(1 + q * exp(u)) without overflow for large u.
double log1p_scaled_exp(double q, double u) {
  if (u > 30.0) return std::log(q) + u + std::log1p(std::exp(-u) / q);
  return std::log1p(q * std::exp(u));
}

void check_finite_state(const SystemState& s) {
  if (!std::isfinite(s.price) || !std::isfinite(s.supply) || !std::isfinite(s.demand)) {
    std::ostringstream msg;
    msg << "blow-up at t=" << s.t;
    fail(ErrorKind::kNumerical, msg.str());
  }
}

class Stepper {
 public:
  Stepper(const RatePath& rates, const OdeParams& params) : rates_(rates), params_(params) {}

  // One RK4 step of length h. Returns true if supply had to be floored.
  bool step(SystemState& s, double h) const {
    const double t = s.t;
    const auto k1 = eval(s, t);
    const auto k2 = eval(advance(s, k1, h / 2), t + h / 2);
    const auto k3 = eval(advance(s, k2, h / 2), t + h / 2);
    const auto k4 = eval(advance(s, k3, h), t + h);
    s.price += h / 6 * (k1.d_price + 2 * k2.d_price + 2 * k3.d_price + k4.d_price);
    s.supply += h / 6 * (k1.d_supply + 2 * k2.d_supply + 2 * k3.d_supply + k4.d_supply);
    s.demand += h / 6 * (k1.d_demand + 2 * k2.d_demand + 2 * k3.d_demand + k4.d_demand);
    s.t = t + h;
    check_finite_state(s);
    if (s.supply < 0.0) {
      s.supply = 0.0;
      return true;
    }
    return false;
  }

 private:
  static SystemState advance(const SystemState& s, const Rates& d, double h) {
    SystemState out{s.t + h, s.price + h * d.d_price, s.supply + h * d.d_supply, s.demand + h * d.d_demand};
    out.supply = std::max(out.supply, 0.0);
    return out;
  }

  Rates eval(const SystemState& s, double t) const {
    SystemState at = s;
    at.t = t;
    check_finite_state(at);
    return rhs(at, rates_.rate(t), rates_.slope(t), params_);
  }

  const RatePath& rates_;
  const OdeParams& params_;
};

std::size_t step_count(double span, double dt) {
  return static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
}

void check_horizon(const SystemState& initial, const RatePath& rates, double t_end, double dt) {
  if (!(dt > 0.0)) fail(ErrorKind::kDomain, "time step must be positive");
  if (!(t_end >= initial.t)) fail(ErrorKind::kDomain, "end time precedes the initial state");
  if (!rates.covers(initial.t, t_end)) {
    std::ostringstream msg;
    msg << "rate path covers [" << rates.t_begin() << ", " << rates.t_end() << "] but the horizon is ["
        << initial.t << ", " << t_end << "]";
    fail(ErrorKind::kDomain, msg.str());
  }
}

}  // namespace

double eval_G(const LogisticCurve& c, double rate) {
  const double u = -c.steepness * (rate - c.midpoint);
  if (u >= 700.0) return c.upper;
  return c.upper - c.drop * std::exp(-c.exponent * log1p_scaled_exp(c.offset, u));
}

double eval_dGdX(const LogisticCurve& c, double rate) {
  const double u = -c.steepness * (rate - c.midpoint);
  const double scale = c.drop * c.exponent * c.offset * c.steepness;
  if (scale == 0.0) return 0.0;
  const double log_mag = std::log(std::abs(scale)) + u - (c.exponent + 1.0) * log1p_scaled_exp(c.offset, u);
  return -std::copysign(std::exp(log_mag), scale);
}

void OdeParams::validate() const {
  const double fields[] = {growth,        switching,      supply_growth,   capacity,
                           consumption,   demand_rate_response, demand_growth, curve.upper,
                           curve.drop,    curve.offset,   curve.steepness, curve.midpoint,
                           curve.exponent};
  for (double f : fields) {
    if (!std::isfinite(f)) fail(ErrorKind::kDomain, "non-finite model parameter");
  }
  if (!(capacity > 0.0)) fail(ErrorKind::kDomain, "supply capacity K must be positive");
  if (!(switching > 0.0)) fail(ErrorKind::kDomain, "switching parameter C must be positive");
}

const std::vector<std::string>& ode_param_names() {
  static const std::vector<std::string> names{"k", "C", "r", "K", "c", "a", "b"};
  return names;
}

double& ode_param(OdeParams& p, std::string_view name) {
  if (name == "k") return p.growth;
  if (name == "C") return p.switching;
  if (name == "r") return p.supply_growth;
  if (name == "K") return p.capacity;
  if (name == "c" || name == "c_s") return p.consumption;
  if (name == "a") return p.demand_rate_response;
  if (name == "b") return p.demand_growth;
  fail(ErrorKind::kDomain, "unknown model parameter '" + std::string(name) + "'");
}

double ode_param(const OdeParams& p, std::string_view name) { return ode_param(const_cast<OdeParams&>(p), name); }

double alpha(double supply, double demand, double switching) {
  if (!(demand > 0.0)) fail(ErrorKind::kDomain, "alpha: demand must be positive");
  if (!(supply >= 0.0)) fail(ErrorKind::kDomain, "alpha: supply must be non-negative");
  const double ratio = supply / demand;
  const double r2 = ratio * ratio;
  if (std::isinf(r2)) return 1.0;
  return r2 / (r2 + switching * switching);
}

Rates rhs(const SystemState& s, double rate, double rate_slope, const OdeParams& p) {
  const double a = alpha(s.supply, s.demand, p.switching);
  Rates d;
  d.d_price = a * eval_dGdX(p.curve, rate) * rate_slope + (1.0 - a) * p.growth;
  d.d_supply = p.supply_growth * s.supply * (1.0 - s.supply / p.capacity) - p.consumption * s.price;
  d.d_demand = p.demand_rate_response * rate + p.demand_growth * s.demand;
  return d;
}

double quarters_since(const Date& epoch, const Date& date) {
  return static_cast<double>(period_index(date, Frequency::kQuarterly) - period_index(epoch, Frequency::kQuarterly));
}

RatePath::RatePath(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) fail(ErrorKind::kDomain, "rate path needs at least one knot");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i].t) || !std::isfinite(knots_[i].rate)) {
      fail(ErrorKind::kDomain, "rate path has a non-finite knot");
    }
    if (i > 0 && !(knots_[i].t > knots_[i - 1].t)) fail(ErrorKind::kDomain, "rate path knots must increase in t");
  }
}

RatePath RatePath::from_series(const TimeSeries& rates, const Date& epoch) {
  if (rates.frequency() != Frequency::kQuarterly) fail(ErrorKind::kDomain, "rate path needs a quarterly series");
  if (rates.empty()) fail(ErrorKind::kDomain, "rate series is empty");
  std::vector<Knot> knots;
  knots.reserve(rates.size());
  for (const auto& p : rates.points()) knots.push_back({quarters_since(epoch, p.date), p.value});
  return RatePath(std::move(knots));
}

RatePath RatePath::constant(double rate, double t_begin, double t_end) {
  if (t_end > t_begin) return RatePath({{t_begin, rate}, {t_end, rate}});
  return RatePath({{t_begin, rate}});
}

bool RatePath::covers(double t0, double t1) const noexcept {
  constexpr double kSlack = 1e-9;
  return t0 >= t_begin() - kSlack && t1 <= t_end() + kSlack;
}

std::size_t RatePath::segment(double t) const {
  if (!covers(t, t)) {
    std::ostringstream msg;
    msg << "rate path does not cover t=" << t;
    fail(ErrorKind::kDomain, msg.str());
  }
  if (knots_.size() == 1) return 0;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                   [](double v, const Knot& k) { return v < k.t; });
  const auto idx = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, knots_.size() - 2);
}

double RatePath::rate(double t) const {
  const auto i = segment(t);
  if (knots_.size() == 1) return knots_.front().rate;
  const auto& a = knots_[i];
  const auto& b = knots_[i + 1];
  return a.rate + (b.rate - a.rate) * (t - a.t) / (b.t - a.t);
}

double RatePath::slope(double t) const {
  const auto i = segment(t);
  if (knots_.size() == 1) return 0.0;
  const auto& a = knots_[i];
  const auto& b = knots_[i + 1];
  return (b.rate - a.rate) / (b.t - a.t);
}

Trajectory simulate(const SystemState& initial, const RatePath& rates, const OdeParams& params, double t_end,
                    double dt) {
  params.validate();
  check_horizon(initial, rates, t_end, dt);
  check_finite_state(initial);

  Trajectory traj;
  const auto record = [&](const SystemState& s) {
    traj.points.push_back({s, alpha(s.supply, s.demand, params.switching), rates.rate(s.t)});
  };
  record(initial);

  const Stepper stepper(rates, params);
  const std::size_t n = step_count(t_end - initial.t, dt);
  SystemState s = initial;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t_next = i == n ? t_end : initial.t + static_cast<double>(i) * dt;
    if (stepper.step(s, t_next - s.t)) traj.supply_clamps.push_back(t_next);
    s.t = t_next;
    record(s);
  }
  return traj;
}

std::vector<SystemState> simulate_at(const SystemState& initial, const RatePath& rates, const OdeParams& params,
                                     std::span<const double> times, double dt) {
  params.validate();
  check_finite_state(initial);
  if (times.empty()) return {};
  check_horizon(initial, rates, times.back(), dt);

  const Stepper stepper(rates, params);
  std::vector<SystemState> out;
  out.reserve(times.size());
  SystemState s = initial;
  for (double target : times) {
    if (target < s.t) fail(ErrorKind::kDomain, "sample times must be ascending and not before the initial state");
    const double start = s.t;
    const std::size_t n = step_count(target - start, dt);
    const double h = n == 0 ? 0.0 : (target - start) / static_cast<double>(n);
    for (std::size_t i = 1; i <= n; ++i) {
      stepper.step(s, h);
      s.t = i == n ? target : start + static_cast<double>(i) * h;
    }
    out.push_back(s);
  }
  return out;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,Y,S,D,alpha\n";
  for (const auto& p : trajectory.points) {
    out += format_double(p.state.t) + ',' + format_double(p.state.price) + ',' + format_double(p.state.supply) +
           ',' + format_double(p.state.demand) + ',' + format_double(p.alpha) + '\n';
  }
  return out;
}

}  // namespace housedyn
