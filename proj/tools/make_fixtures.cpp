// Writes the synthetic fixture series under a target directory. The series
// have the shape of the Australian data (quarterly mortgage rate and dwelling
// value from 2011, monthly CPI and rate, a daily mortgage-insurer stock price
// from 2014) but every value is generated here from fixed seeds.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "housedyn/dynamics.hpp"
#include "housedyn/evt.hpp"
#include "housedyn/optimize.hpp"
#include "housedyn/synthetic.hpp"
#include "housedyn/timeseries.hpp"

namespace {

using namespace housedyn;
using std::chrono::month;
using std::chrono::year;
using std::chrono::year_month;

struct MonthAnchor {
  int year;
  unsigned month;
  double value;
};

// Quarter-end standard variable mortgage rate, 2011Q1 to 2025Q2.
const std::vector<double> kQuarterlyRate = {
    7.80, 7.80, 7.80, 7.55,  // 2011
    7.40, 7.10, 6.95, 6.60,  // 2012
    6.45, 6.20, 5.95, 5.95,  // 2013
    5.95, 5.95, 5.95, 5.95,  // 2014
    5.70, 5.45, 5.45, 5.45,  // 2015
    5.45, 5.25, 5.25, 5.25,  // 2016
    5.25, 5.25, 5.25, 5.25,  // 2017
    5.25, 5.25, 5.25, 5.25,  // 2018
    5.25, 5.00, 4.70, 4.50,  // 2019
    4.40, 3.90, 3.60, 3.45,  // 2020
    3.40, 3.40, 3.40, 3.40,  // 2021
    3.40, 3.90, 5.20, 5.90,  // 2022
    6.40, 6.80, 7.00, 7.20,  // 2023
    7.20, 7.20, 7.20, 7.20,  // 2024
    7.05, 6.85,              // 2025
};

const std::vector<MonthAnchor> kCpiAnchors = {
    {2014, 1, 105.0},  {2014, 3, 105.4},  {2014, 12, 106.6}, {2015, 12, 108.4}, {2016, 12, 110.0},
    {2017, 12, 112.1}, {2018, 12, 114.1}, {2019, 12, 116.2}, {2020, 6, 114.4},  {2020, 12, 117.2},
    {2021, 12, 121.3}, {2022, 12, 130.8}, {2023, 12, 136.1}, {2024, 12, 139.4}, {2025, 12, 143.0},
};

const GevCoefficients kPre2020{17.76, -0.54, -0.13, 1.21, -0.01, 0.18};
const GevCoefficients kPost2020{-17.92, -2.75, 0.20, 0.46, -0.00, 0.00};

double normal(UniformStream& rng) {
  const double u1 = rng.next_open();
  const double u2 = rng.next();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

Date month_end(int y, unsigned m) { return period_end(Date{year{y}, month{m}, std::chrono::day{1}}, Frequency::kMonthly); }

Date quarter_end(int index_from_2011q1) {
  const int y = 2011 + index_from_2011q1 / 4;
  const unsigned m = static_cast<unsigned>(index_from_2011q1 % 4) * 3 + 3;
  return month_end(y, m);
}

long month_ordinal(int y, unsigned m) { return static_cast<long>(y) * 12 + static_cast<long>(m) - 1; }

// Linear interpolation over month ordinals; clamps outside the anchors.
double interpolate(const std::vector<MonthAnchor>& anchors, long ordinal) {
  if (ordinal <= month_ordinal(anchors.front().year, anchors.front().month)) return anchors.front().value;
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    const long a = month_ordinal(anchors[i - 1].year, anchors[i - 1].month);
    const long b = month_ordinal(anchors[i].year, anchors[i].month);
    if (ordinal <= b) {
      const double w = static_cast<double>(ordinal - a) / static_cast<double>(b - a);
      return anchors[i - 1].value + w * (anchors[i].value - anchors[i - 1].value);
    }
  }
  return anchors.back().value;
}

void save(const TimeSeries& s, const std::filesystem::path& dir, const std::string& file) {
  write_csv(s, dir / file);
  std::cout << "wrote " << (dir / file).string() << " (" << s.size() << " rows)\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "data/fixtures";
  std::filesystem::create_directories(out);

  // Quarterly mortgage rate and dwelling value. Before 2020 price follows the
  // logistic curve of the rate; afterwards it grows linearly regardless of rate.
  std::vector<Observation> rate_q, price_q, completions_q;
  UniformStream price_rng(2011, 1), comp_rng(2011, 2);
  const LogisticCurve curve;
  double last_pre = 0.0;
  for (std::size_t i = 0; i < kQuarterlyRate.size(); ++i) {
    const Date d = quarter_end(static_cast<int>(i));
    rate_q.push_back({d, kQuarterlyRate[i]});
    double price = 0.0;
    double completions = 0.0;
    if (d < Date{year{2020}, month{1}, std::chrono::day{1}}) {
      price = eval_G(curve, kQuarterlyRate[i]) + 4.0 * normal(price_rng);
      last_pre = price;
      completions = 15000.0 + 25.0 * price + 300.0 * normal(comp_rng);
    } else {
      const double quarters_after = static_cast<double>(i) - 35.0;
      price = last_pre + 14.0 * quarters_after + 6.0 * normal(price_rng);
      completions = 33000.0 + 1500.0 * normal(comp_rng);
    }
    price_q.push_back({d, std::round(price * 10.0) / 10.0});
    completions_q.push_back({d, std::round(completions)});
  }
  save(TimeSeries("mortgage_rate", Frequency::kQuarterly, rate_q), out, "mortgage_rate_quarterly.csv");
  save(TimeSeries("dwelling_value", Frequency::kQuarterly, price_q), out, "dwelling_value_quarterly.csv");
  save(TimeSeries("completions", Frequency::kQuarterly, completions_q), out, "completions_quarterly.csv");

  // Monthly net migration with no relation to price.
  std::vector<Observation> migration;
  UniformStream mig_rng(1991, 3);
  for (int y = 2011; y <= 2025; ++y) {
    for (unsigned m = 1; m <= 12; ++m) {
      if (y == 2025 && m > 9) break;
      migration.push_back({month_end(y, m), std::round(15000.0 + 4000.0 * normal(mig_rng))});
    }
  }
  save(TimeSeries("net_migration", Frequency::kMonthly, migration), out, "net_migration_monthly.csv");

  // Monthly covariates 2014-2025: CPI from anchors, rate interpolated between
  // the quarter-end knots.
  std::vector<MonthAnchor> rate_anchors;
  for (std::size_t i = 0; i < kQuarterlyRate.size(); ++i) {
    rate_anchors.push_back({2011 + static_cast<int>(i) / 4, static_cast<unsigned>(i % 4) * 3 + 3, kQuarterlyRate[i]});
  }
  std::vector<Observation> cpi_m, rate_m;
  std::vector<Block> pre_layout, transition_layout, post_layout;
  for (int y = 2014; y <= 2025; ++y) {
    for (unsigned m = 1; m <= 12; ++m) {
      const long ord = month_ordinal(y, m);
      const double cpi = std::round(interpolate(kCpiAnchors, ord) * 100.0) / 100.0;
      const double rate = std::round(interpolate(rate_anchors, ord) * 1000.0) / 1000.0;
      cpi_m.push_back({month_end(y, m), cpi});
      rate_m.push_back({month_end(y, m), rate});
      const Block b{year_month{year{y}, month{m}}, 0.0, cpi, rate, 0};
      (y < 2020 ? pre_layout : y == 2020 ? transition_layout : post_layout).push_back(b);
    }
  }
  save(TimeSeries("cpi", Frequency::kMonthly, cpi_m), out, "cpi_monthly.csv");
  save(TimeSeries("rate", Frequency::kMonthly, rate_m), out, "mortgage_rate_monthly.csv");

  // Daily stock price whose monthly maxima follow the two fitted regimes.
  BlockMaxima all;
  for (const auto& part : {sample_blocks(kPre2020, pre_layout, 14),
                           sample_blocks(kPost2020, transition_layout, 20),
                           sample_blocks(kPost2020, post_layout, 21)}) {
    all.blocks.insert(all.blocks.end(), part.blocks.begin(), part.blocks.end());
  }
  for (auto& b : all.blocks) b.max_value = std::round(b.max_value * 1000.0) / 1000.0;
  auto daily = daily_path_with_maxima(all, 0.15, 2014, "helia");
  std::vector<Observation> rounded;
  for (const auto& p : daily.points()) rounded.push_back({p.date, std::round(p.value * 1000.0) / 1000.0});
  save(TimeSeries("helia", Frequency::kDaily, rounded), out, "helia_daily.csv");
  return 0;
}
