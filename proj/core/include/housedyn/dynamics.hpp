#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "housedyn/timeseries.hpp"

namespace housedyn {

/// Generalised logistic (Richards) curve linking mortgage rate to price:
///   G(X) = upper - drop / (1 + offset * exp(-steepness * (X - midpoint)))^exponent
/// Strictly decreasing when drop, offset, steepness and exponent are positive,
/// with G(-inf) = upper and G(+inf) = upper - drop.
struct LogisticCurve {
  double upper = 683.8;     // A, $'000
  double drop = 197.7;      // B, $'000
  double offset = 0.5;      // Q
  double steepness = 5.0;   // g, per rate-point
  double midpoint = 5.1;    // M, rate-points
  double exponent = 10.0;   // nu

  [[nodiscard]] bool decreasing() const noexcept {
    return drop > 0.0 && offset > 0.0 && steepness > 0.0 && exponent > 0.0;
  }

  friend bool operator==(const LogisticCurve&, const LogisticCurve&) = default;
};

[[nodiscard]] double eval_G(const LogisticCurve& curve, double rate);
[[nodiscard]] double eval_dGdX(const LogisticCurve& curve, double rate);

/// Coefficients of the price/supply/demand system. Defaults are the values
/// calibrated on 2011-2019 data.
struct OdeParams {
  double growth = 20.0;                 // k: linear price growth, $'000 per quarter
  double switching = 0.6324555320336759;  // C: Hill switching ratio, sqrt(0.4)
  double supply_growth = 0.5;           // r: logistic supply growth rate
  double capacity = 800.0;              // K: supply carrying capacity
  double consumption = 0.1;             // c_s: supply consumed per $'000 of price
  double demand_rate_response = 1.0;    // a: demand change per rate-point
  double demand_growth = 0.02;          // b: demand self-growth rate
  LogisticCurve curve;

  /// Throws Error(kDomain) unless capacity > 0, switching > 0 and every
  /// field is finite.
  void validate() const;

  friend bool operator==(const OdeParams&, const OdeParams&) = default;
};

/// Names used in parameter files, in a fixed order: k, C, r, K, c, a, b.
[[nodiscard]] const std::vector<std::string>& ode_param_names();
/// Field by parameter-file name ("c_s" is accepted as an alias of "c").
[[nodiscard]] double& ode_param(OdeParams& p, std::string_view name);
[[nodiscard]] double ode_param(const OdeParams& p, std::string_view name);

struct SystemState {
  double t = 0.0;  // quarters since the rate path epoch
  double price = 0.0;
  double supply = 0.0;
  double demand = 0.0;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

struct Rates {
  double d_price = 0.0;
  double d_supply = 0.0;
  double d_demand = 0.0;
};

/// Hill coupling (S/D)^2 / ((S/D)^2 + C^2). Requires demand > 0, supply >= 0.
[[nodiscard]] double alpha(double supply, double demand, double switching);

/// Time derivatives of (price, supply, demand) given the exogenous mortgage
/// rate and its time derivative.
[[nodiscard]] Rates rhs(const SystemState& state, double rate, double rate_slope, const OdeParams& params);

/// Whole quarters from the quarter containing `epoch` to the quarter
/// containing `date`.
[[nodiscard]] double quarters_since(const Date& epoch, const Date& date);

/// Mortgage rate as a continuous function of time: linear between knots, so
/// the slope is piecewise constant and right-continuous at each knot.
class RatePath {
 public:
  struct Knot {
    double t;
    double rate;
  };

  explicit RatePath(std::vector<Knot> knots);

  /// Knots at quarters_since(epoch, date) for each point of a quarterly series.
  static RatePath from_series(const TimeSeries& quarterly_rates, const Date& epoch);
  static RatePath constant(double rate, double t_begin, double t_end);

  [[nodiscard]] double t_begin() const noexcept { return knots_.front().t; }
  [[nodiscard]] double t_end() const noexcept { return knots_.back().t; }
  [[nodiscard]] bool covers(double t0, double t1) const noexcept;
  [[nodiscard]] double rate(double t) const;
  [[nodiscard]] double slope(double t) const;
  [[nodiscard]] std::span<const Knot> knots() const noexcept { return knots_; }

 private:
  [[nodiscard]] std::size_t segment(double t) const;

  std::vector<Knot> knots_;
};

struct TrajectoryPoint {
  SystemState state;
  double alpha = 0.0;
  double rate = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  /// Step end times at which supply went negative and was reset to zero.
  std::vector<double> supply_clamps;
};

/// Classical fixed-step RK4 from `initial.t` to `t_end`; the last step is
/// shortened to land on `t_end`. Supply is floored at zero after every stage.
/// Throws Error(kDomain) if the rate path does not cover the horizon and
/// Error(kNumerical) on a non-finite state.
[[nodiscard]] Trajectory simulate(const SystemState& initial, const RatePath& rates, const OdeParams& params,
                                  double t_end, double dt = 0.05);

/// States at each of `times` (ascending, >= initial.t), integrating each gap
/// with the largest uniform step not exceeding `dt`.
[[nodiscard]] std::vector<SystemState> simulate_at(const SystemState& initial, const RatePath& rates,
                                                   const OdeParams& params, std::span<const double> times,
                                                   double dt = 0.05);

/// `t,Y,S,D,alpha` rows.
[[nodiscard]] std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace housedyn
