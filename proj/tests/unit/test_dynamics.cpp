#include "housedyn/dynamics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "housedyn/error.hpp"
#include "temp_dir.hpp"

namespace housedyn {
namespace {

constexpr double kC = 0.6324555320336759;

// Direct transcription of the curve, no overflow guards.
long double g_oracle(long double x) {
  return 683.8L - 197.7L / std::pow(1.0L + 0.5L * std::exp(-5.0L * (x - 5.1L)), 10.0L);
}

double demand_closed_form(double d0, double a, double b, double x, double t) {
  return (d0 + a * x / b) * std::exp(b * t) - a * x / b;
}

double logistic_closed_form(double k, double r, double t) { return k / (1.0 + std::exp(-r * t)); }

OdeParams demand_only() {
  OdeParams p;
  p.growth = 0.0;
  p.supply_growth = 0.0;
  p.consumption = 0.0;
  return p;
}

double demand_error(double dt, double t_end) {
  const auto traj = simulate({0.0, 500.0, 100.0, 1.0}, RatePath::constant(5.0, 0.0, t_end), demand_only(), t_end, dt);
  const double exact = demand_closed_form(1.0, 1.0, 0.02, 5.0, t_end);
  return std::abs(traj.points.back().state.demand - exact) / exact;
}

double supply_error(double dt, double t_end) {
  OdeParams p;
  p.consumption = 0.0;
  const auto traj = simulate({0.0, 500.0, 400.0, 200.0}, RatePath::constant(5.0, 0.0, t_end), p, t_end, dt);
  const double exact = logistic_closed_form(800.0, 0.5, t_end);
  return std::abs(traj.points.back().state.supply - exact) / exact;
}

TEST(Curve, AnchorValues) {
  const LogisticCurve c;
  EXPECT_NEAR(eval_G(c, 5.1), 683.8 - 197.7 / std::pow(1.5, 10.0), 1e-12);
  EXPECT_NEAR(eval_G(c, 5.1), 680.37, 0.01);
  EXPECT_NEAR(eval_G(c, 0.0), 683.8, 1e-6);
  EXPECT_NEAR(eval_G(c, 1e6), 486.1, 1e-9);
  EXPECT_DOUBLE_EQ(eval_G(c, -1e6), 683.8);
  for (double x = 0.0; x <= 12.0; x += 0.37) EXPECT_NEAR(eval_G(c, x), static_cast<double>(g_oracle(x)), 1e-10) << x;
}

TEST(Curve, DecreasingAndBounded) {
  const LogisticCurve c;
  EXPECT_TRUE(c.decreasing());
  double prev = eval_G(c, -5.0);
  for (double x = -5.0; x <= 15.0; x += 0.01) {
    const double g = eval_G(c, x);
    EXPECT_LE(g, prev + 1e-12);
    EXPECT_GE(g, 486.1 - 1e-9);
    EXPECT_LE(g, 683.8 + 1e-9);
    prev = g;
  }
  LogisticCurve flat = c;
  flat.drop = 0.0;
  EXPECT_FALSE(flat.decreasing());
}

TEST(Curve, DerivativeMatchesFiniteDifference) {
  const LogisticCurve c;
  const double h = 1e-5;
  const double fd = (eval_G(c, 5.1 + h) - eval_G(c, 5.1 - h)) / (2 * h);
  EXPECT_NEAR(eval_dGdX(c, 5.1) / fd, 1.0, 1e-6);
  // Extended-precision differences keep rounding noise near 1e-11 absolute.
  for (double x = 0.0; x <= 10.0; x += 0.05) {
    const double d = eval_dGdX(c, x);
    const auto f = static_cast<double>((g_oracle(x + 1e-5L) - g_oracle(x - 1e-5L)) / 2e-5L);
    EXPECT_LE(d, 0.0);
    if (std::abs(f) > 1e-5) {
      EXPECT_NEAR(d / f, 1.0, 1e-5) << x;
    } else {
      EXPECT_NEAR(d, f, 1e-10) << x;
    }
  }
  EXPECT_NEAR(eval_dGdX(c, 1e6), 0.0, 1e-300);
  EXPECT_NEAR(eval_dGdX(c, -1e6), 0.0, 1e-300);
}

TEST(Curve, NoOverflowInExtremeTails) {
  LogisticCurve c;
  c.steepness = 50.0;
  EXPECT_TRUE(std::isfinite(eval_G(c, -100.0)));
  EXPECT_TRUE(std::isfinite(eval_dGdX(c, -100.0)));
  EXPECT_TRUE(std::isfinite(eval_G(c, 100.0)));
  EXPECT_TRUE(std::isfinite(eval_dGdX(c, 100.0)));
}

TEST(Alpha, Anchors) {
  EXPECT_EQ(alpha(0.0, 3.0, kC), 0.0);
  EXPECT_EQ(alpha(kC * 200.0, 200.0, kC), 0.5);
  EXPECT_NEAR(alpha(5.0, 5.0, kC), 1.0 / 1.4, 1e-15);
  EXPECT_NEAR(alpha(400.0, 200.0, kC), 4.0 / 4.4, 1e-15);
}

TEST(Alpha, DomainErrors) {
  EXPECT_THROW((void)alpha(1.0, 0.0, kC), Error);
  EXPECT_THROW((void)alpha(1.0, -2.0, kC), Error);
  EXPECT_THROW((void)alpha(-1.0, 2.0, kC), Error);
  try {
    (void)alpha(1.0, 0.0, kC);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDomain);
  }
}

TEST(Alpha, BoundedAndIncreasingInSupply) {
  for (double d : {0.5, 10.0, 300.0}) {
    double prev = -1.0;
    for (double s = 0.0; s <= 2000.0; s += 1.7) {
      const double a = alpha(s, d, kC);
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
      if (s > 0.0 && a < 1.0) EXPECT_GT(a, prev);
      prev = a;
    }
  }
}

TEST(Rhs, Anchors) {
  const OdeParams p;
  const auto zero_supply = rhs({0.0, 500.0, 0.0, 200.0}, 5.0, -0.3, p);
  EXPECT_DOUBLE_EQ(zero_supply.d_price, 20.0);
  EXPECT_DOUBLE_EQ(zero_supply.d_supply, -0.1 * 500.0);
  EXPECT_DOUBLE_EQ(zero_supply.d_demand, 5.0 + 0.02 * 200.0);

  const auto flat = rhs({0.0, 500.0, 300.0, 200.0}, 5.0, 0.0, p);
  EXPECT_NEAR(flat.d_price, (1.0 - alpha(300.0, 200.0, kC)) * 20.0, 1e-13);

  const auto equilibrium = rhs({0.0, 0.0, 800.0, 200.0}, 5.0, 0.0, p);
  EXPECT_DOUBLE_EQ(equilibrium.d_supply, 0.0);

  const SystemState s{0.0, 450.0, 350.0, 180.0};
  const double a = alpha(350.0, 180.0, kC);
  const auto full = rhs(s, 4.2, 0.25, p);
  EXPECT_NEAR(full.d_price, a * eval_dGdX(p.curve, 4.2) * 0.25 + (1.0 - a) * 20.0, 1e-12);
  EXPECT_NEAR(full.d_supply, 0.5 * 350.0 * (1.0 - 350.0 / 800.0) - 0.1 * 450.0, 1e-12);
  EXPECT_THROW((void)rhs({0.0, 1.0, 1.0, 0.0}, 5.0, 0.0, p), Error);
}

TEST(Params, NamesAndValidation) {
  OdeParams p;
  EXPECT_EQ(ode_param_names(), (std::vector<std::string>{"k", "C", "r", "K", "c", "a", "b"}));
  EXPECT_EQ(ode_param(p, "k"), 20.0);
  EXPECT_EQ(ode_param(p, "C"), kC);
  EXPECT_EQ(ode_param(p, "r"), 0.5);
  EXPECT_EQ(ode_param(p, "K"), 800.0);
  EXPECT_EQ(ode_param(p, "c"), 0.1);
  EXPECT_EQ(ode_param(p, "c_s"), 0.1);
  EXPECT_EQ(ode_param(p, "a"), 1.0);
  EXPECT_EQ(ode_param(p, "b"), 0.02);
  ode_param(p, "c_s") = 0.2;
  EXPECT_EQ(p.consumption, 0.2);
  EXPECT_THROW((void)ode_param(p, "z"), Error);
  EXPECT_NO_THROW(p.validate());
  p.capacity = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p = OdeParams{};
  p.switching = -1.0;
  EXPECT_THROW(p.validate(), Error);
  p = OdeParams{};
  p.curve.exponent = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(p.validate(), Error);
}

TEST(RatePathTest, InterpolatesAndHasRightContinuousSlope) {
  const RatePath path({{0.0, 5.0}, {1.0, 6.0}, {2.0, 5.0}});
  EXPECT_DOUBLE_EQ(path.rate(0.0), 5.0);
  EXPECT_DOUBLE_EQ(path.rate(0.5), 5.5);
  EXPECT_DOUBLE_EQ(path.rate(1.0), 6.0);
  EXPECT_DOUBLE_EQ(path.rate(1.25), 5.75);
  EXPECT_DOUBLE_EQ(path.slope(0.5), 1.0);
  EXPECT_DOUBLE_EQ(path.slope(1.0), -1.0);
  EXPECT_DOUBLE_EQ(path.slope(2.0), -1.0);
  EXPECT_TRUE(path.covers(0.0, 2.0));
  EXPECT_FALSE(path.covers(0.0, 2.5));
  EXPECT_THROW((void)path.rate(-0.1), Error);
  EXPECT_THROW(RatePath({{0.0, 1.0}, {0.0, 2.0}}), Error);
  EXPECT_THROW(RatePath(std::vector<RatePath::Knot>{}), Error);
}

TEST(RatePathTest, FromQuarterlySeries) {
  const TimeSeries s("rate", Frequency::kQuarterly,
                     {{parse_date("2011-03-31"), 7.8}, {parse_date("2011-06-30"), 7.4}, {parse_date("2012-03-31"), 7.0}});
  const auto path = RatePath::from_series(s, parse_date("2011-01-01"));
  ASSERT_EQ(path.knots().size(), 3u);
  EXPECT_EQ(path.knots()[0].t, 0.0);
  EXPECT_EQ(path.knots()[1].t, 1.0);
  EXPECT_EQ(path.knots()[2].t, 4.0);
  EXPECT_NEAR(path.slope(2.0), -0.4 / 3.0, 1e-15);
  const TimeSeries monthly("rate", Frequency::kMonthly, {{parse_date("2011-01-31"), 1.0}});
  EXPECT_THROW((void)RatePath::from_series(monthly, parse_date("2011-01-01")), Error);
  EXPECT_EQ(quarters_since(parse_date("2011-02-14"), parse_date("2013-12-31")), 11.0);
}

TEST(Simulate, DemandClosedForm) {
  const double exact = demand_closed_form(1.0, 1.0, 0.02, 5.0, 1.0);
  EXPECT_NEAR(exact, 251.0 * std::exp(0.02) - 250.0, 1e-12);
  EXPECT_NEAR(exact, 6.0705, 1e-4);
  const auto coarse = simulate({0.0, 500.0, 100.0, 1.0}, RatePath::constant(5.0, 0.0, 1.0), demand_only(), 1.0, 0.25);
  EXPECT_NEAR(coarse.points.back().state.demand / exact, 1.0, 1e-6);
  EXPECT_LT(demand_error(0.05, 1.0), 1e-6);
}

TEST(Simulate, SupplyClosedForm) {
  EXPECT_LT(supply_error(0.05, 4.0), 1e-6);
  EXPECT_LT(supply_error(0.25, 4.0), 1e-6);
}

TEST(Simulate, FourthOrderConvergence) {
  // Coarse steps keep the error well above rounding.
  const double d1 = demand_error(2.0, 20.0), d2 = demand_error(1.0, 20.0);
  EXPECT_GE(d1 / d2, 12.0) << d1 << " " << d2;
  const double s1 = supply_error(0.5, 4.0), s2 = supply_error(0.25, 4.0);
  EXPECT_GE(s1 / s2, 12.0) << s1 << " " << s2;
}

TEST(Simulate, ZeroHorizonAndGrid) {
  const SystemState init{2.0, 500.0, 400.0, 200.0};
  const auto path = RatePath::constant(5.0, 0.0, 10.0);
  const auto same = simulate(init, path, OdeParams{}, 2.0);
  ASSERT_EQ(same.points.size(), 1u);
  EXPECT_EQ(same.points[0].state, init);

  const auto traj = simulate(init, path, OdeParams{}, 3.0, 0.3);
  ASSERT_EQ(traj.points.size(), 5u);
  EXPECT_DOUBLE_EQ(traj.points[1].state.t, 2.3);
  EXPECT_DOUBLE_EQ(traj.points.back().state.t, 3.0);
  for (const auto& pt : traj.points) {
    EXPECT_DOUBLE_EQ(pt.alpha, alpha(pt.state.supply, pt.state.demand, kC));
    EXPECT_DOUBLE_EQ(pt.rate, 5.0);
  }
}

TEST(Simulate, Errors) {
  const SystemState init{0.0, 500.0, 400.0, 200.0};
  const auto path = RatePath::constant(5.0, 0.0, 10.0);
  const auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kParse;
  };
  EXPECT_EQ(kind_of([&] { (void)simulate(init, path, OdeParams{}, 11.0); }), ErrorKind::kDomain);
  EXPECT_EQ(kind_of([&] { (void)simulate({1.0, 500.0, 400.0, 200.0}, path, OdeParams{}, 0.5); }), ErrorKind::kDomain);
  EXPECT_EQ(kind_of([&] { (void)simulate(init, path, OdeParams{}, 1.0, 0.0); }), ErrorKind::kDomain);

  OdeParams explosive;
  explosive.demand_growth = 1e5;
  try {
    (void)simulate(init, path, explosive, 10.0, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumerical);
    EXPECT_NE(std::string(e.what()).find("blow-up at t="), std::string::npos);
  }
}

TEST(Simulate, SupplyClampIsReported) {
  OdeParams p;
  p.consumption = 5.0;
  const auto traj = simulate({0.0, 500.0, 10.0, 200.0}, RatePath::constant(5.0, 0.0, 5.0), p, 5.0);
  ASSERT_FALSE(traj.supply_clamps.empty());
  for (const auto& pt : traj.points) EXPECT_GE(pt.state.supply, 0.0);
  EXPECT_EQ(traj.points.back().state.supply, 0.0);
  EXPECT_EQ(traj.points.back().alpha, 0.0);
}

TEST(Simulate, SimulateAtMatchesSimulateOnGrid) {
  const SystemState init{0.0, 500.0, 400.0, 200.0};
  const auto path = RatePath({{0.0, 5.0}, {4.0, 6.0}, {8.0, 4.0}});
  const auto traj = simulate(init, path, OdeParams{}, 8.0, 0.05);
  const std::vector<double> times{1.0, 4.0, 8.0};
  const auto states = simulate_at(init, path, OdeParams{}, times, 0.05);
  ASSERT_EQ(states.size(), 3u);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& ref = traj.points[static_cast<std::size_t>(std::lround(times[i] / 0.05))].state;
    EXPECT_NEAR(states[i].price, ref.price, 1e-9);
    EXPECT_NEAR(states[i].supply, ref.supply, 1e-9);
    EXPECT_NEAR(states[i].demand, ref.demand, 1e-9);
  }
  const std::vector<double> backwards{2.0, 1.0};
  EXPECT_THROW((void)simulate_at(init, path, OdeParams{}, backwards), Error);
}

TEST(Simulate, CsvLayout) {
  const auto traj = simulate({0.0, 500.0, 400.0, 200.0}, RatePath::constant(5.0, 0.0, 1.0), OdeParams{}, 0.1, 0.05);
  const auto csv = trajectory_csv(traj);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,Y,S,D,alpha");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 12), "0,500,400,20");
}

// Qualitative shape of the coupled run with the default coefficients and the
// historical-shaped rate path.
class DefaultRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto rates = load_csv(housedyn::testing::fixture("mortgage_rate_quarterly.csv"), Frequency::kQuarterly);
    const auto price = load_csv(housedyn::testing::fixture("dwelling_value_quarterly.csv"), Frequency::kQuarterly);
    const Date epoch = rates.points().front().date;
    const auto path = RatePath::from_series(rates, epoch);
    traj_ = new Trajectory(simulate({0.0, price.points().front().value, 400.0, 200.0}, path, OdeParams{}, path.t_end()));
  }
  static void TearDownTestSuite() { delete traj_; }
  static Trajectory* traj_;
};
Trajectory* DefaultRun::traj_ = nullptr;

TEST_F(DefaultRun, AlphaRisesToUniquePeakThenDeclines) {
  const auto& pts = traj_->points;
  const auto peak = static_cast<std::size_t>(
      std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; }) -
      pts.begin());
  ASSERT_GT(peak, 0u);
  ASSERT_LT(peak, pts.size() - 1);
  for (std::size_t i = 1; i <= peak; ++i) EXPECT_GE(pts[i].alpha, pts[i - 1].alpha) << pts[i].state.t;
  for (std::size_t i = peak + 1; i < pts.size(); ++i) EXPECT_LT(pts[i].alpha, pts[i - 1].alpha) << pts[i].state.t;
  EXPECT_LT(pts.back().alpha, 0.5);
}

TEST_F(DefaultRun, DemandIncreases) {
  const auto& pts = traj_->points;
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_GT(pts[i].state.demand, pts[i - 1].state.demand);
  EXPECT_TRUE(traj_->supply_clamps.empty());
}

TEST_F(DefaultRun, SupplyDeclinesAfterPeakThroughRatePlateau) {
  const auto& pts = traj_->points;
  const auto peak = static_cast<std::size_t>(
      std::max_element(pts.begin(), pts.end(),
                       [](const auto& a, const auto& b) { return a.state.supply < b.state.supply; }) -
      pts.begin());
  ASSERT_GT(peak, 0u);
  // Up to the 2022 hiking cycle; the price dip during the hikes lets supply recover briefly.
  for (std::size_t i = peak + 1; i < pts.size() && pts[i].state.t <= 45.0; ++i) {
    EXPECT_LT(pts[i].state.supply, pts[i - 1].state.supply) << pts[i].state.t;
  }
  EXPECT_LT(pts.back().state.supply, pts[peak].state.supply);
}

}  // namespace
}  // namespace housedyn
