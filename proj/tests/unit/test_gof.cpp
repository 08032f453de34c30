#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "housedyn/error.hpp"
#include "housedyn/evt.hpp"
#include "housedyn/optimize.hpp"

namespace housedyn {
namespace {

// Kolmogorov upper tail by its alternating series.
double kolmogorov_tail(double lambda) {
  double p = 0.0;
  for (int k = 1; k <= 1000; ++k) p += 2.0 * (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return p;
}

TEST(Ks, MidpointGrid) {
  std::vector<double> u;
  for (int i = 1; i <= 100; ++i) u.push_back((2.0 * i - 1.0) / 200.0);
  EXPECT_NEAR(ks_uniform_statistic(u), 0.005, 1e-15);
  EXPECT_NEAR(ks_pvalue(0.005, 100), 1.0, 1e-12);
}

TEST(Ks, SinglePoint) {
  const std::vector<double> u{0.5};
  EXPECT_DOUBLE_EQ(ks_uniform_statistic(u), 0.5);
  const std::vector<double> edge{0.1};
  EXPECT_DOUBLE_EQ(ks_uniform_statistic(edge), 0.9);
}

TEST(Ks, OrderInvariant) {
  const std::vector<double> a{0.1, 0.7, 0.3, 0.95}, b{0.95, 0.3, 0.1, 0.7};
  EXPECT_EQ(ks_uniform_statistic(a), ks_uniform_statistic(b));
  EXPECT_THROW((void)ks_uniform_statistic(std::vector<double>{}), Error);
}

TEST(Ks, PValueMatchesSeries) {
  for (std::size_t n : {10u, 50u, 400u}) {
    for (double d = 0.01; d < 0.6; d += 0.013) {
      const double rn = std::sqrt(static_cast<double>(n));
      const double lambda = (rn + 0.12 + 0.11 / rn) * d;
      if (lambda < 0.3) continue;  // alternating series is slow there
      EXPECT_NEAR(ks_pvalue(d, n), std::clamp(kolmogorov_tail(lambda), 0.0, 1.0), 1e-10) << n << " " << d;
    }
  }
  // Both branches meet at the switch point.
  const double d_switch = 1.18 / 1.23;  // lambda = 1.23 d when n = 1
  const double just_below = ks_pvalue(d_switch - 1e-9, 1), just_above = ks_pvalue(d_switch + 1e-9, 1);
  EXPECT_NEAR(just_below, just_above, 1e-8);
  // 1% and 5% critical values of the limiting distribution.
  EXPECT_NEAR(kolmogorov_tail(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(kolmogorov_tail(1.3581), 0.05, 1e-4);
}

TEST(Ad, SinglePoint) {
  const std::vector<double> u{0.5};
  EXPECT_NEAR(ad_uniform_statistic(u), -1.0 - 2.0 * std::log(0.5), 1e-15);
  EXPECT_NEAR(ad_uniform_statistic(u), 0.38629, 1e-5);
}

TEST(Ad, MatchesDefinition) {
  UniformStream rng(4, 4);
  std::vector<double> u(25);
  for (auto& v : u) v = rng.next_open();
  std::vector<double> s = u;
  std::sort(s.begin(), s.end());
  const double n = 25;
  double sum = 0.0;
  for (int i = 1; i <= 25; ++i) sum += (2.0 * i - 1.0) * (std::log(s[i - 1]) + std::log(1.0 - s[25 - i]));
  EXPECT_NEAR(ad_uniform_statistic(u), -n - sum / n, 1e-12);
  const std::vector<double> degenerate{0.0, 0.5};
  EXPECT_EQ(ad_uniform_statistic(degenerate), std::numeric_limits<double>::infinity());
  EXPECT_EQ(ad_pvalue(std::numeric_limits<double>::infinity()), 0.0);
}

TEST(Ad, CriticalValues) {
  // Upper percentage points of the limiting A^2 distribution.
  EXPECT_NEAR(ad_pvalue(1.933), 0.10, 1e-3);
  EXPECT_NEAR(ad_pvalue(2.492), 0.05, 1e-3);
  EXPECT_NEAR(ad_pvalue(3.857), 0.01, 5e-4);
  EXPECT_EQ(ad_pvalue(0.0), 1.0);
  double prev = 1.0;
  for (double a = 0.05; a < 10.0; a += 0.05) {
    const double p = ad_pvalue(a);
    EXPECT_LE(p, prev + 1e-12);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
}

TEST(Gof, UniformSamplesRarelyRejected) {
  int ks_reject = 0, ad_reject = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    UniformStream rng(seed, 1);
    std::vector<double> u(60);
    for (auto& v : u) v = rng.next_open();
    const auto r = gof_uniform(u);
    ks_reject += r.ks_p < 0.05;
    ad_reject += r.ad_p < 0.05;
  }
  // Binomial(400, 0.05): mean 20, sd 4.4.
  EXPECT_LT(ks_reject, 36);
  EXPECT_LT(ad_reject, 36);
  EXPECT_GT(ad_reject, 6);
}

TEST(Gof, DetectsWrongModel) {
  UniformStream rng(2, 2);
  std::vector<double> u(200);
  for (auto& v : u) v = std::pow(rng.next_open(), 2.0);
  const auto r = gof_uniform(u);
  EXPECT_LT(r.ks_p, 1e-3);
  EXPECT_LT(r.ad_p, 1e-3);
}

TEST(LrTest, ChiSquareTail) {
  EXPECT_NEAR(lr_test(3.841 / 2.0, 0.0, 1), std::erfc(std::sqrt(3.841 / 2.0)), 1e-12);
  EXPECT_NEAR(lr_test(3.841 / 2.0, 0.0, 1), 0.050, 1e-3);
  EXPECT_NEAR(lr_test(10.0, 7.0, 2), std::exp(-3.0), 1e-12);
  EXPECT_EQ(lr_test(5.0, 5.0, 1), 1.0);
  EXPECT_EQ(lr_test(5.0, 5.0, 3), 1.0);
  EXPECT_EQ(lr_test(5.0, 5.0 + 5e-10, 3), 1.0);
}

TEST(LrTest, Errors) {
  try {
    (void)lr_test(4.0, 5.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "models not nested or misfit");
  }
  EXPECT_THROW((void)lr_test(5.0, 4.0, 0), Error);
}

}  // namespace
}  // namespace housedyn
