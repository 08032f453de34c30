#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "cli_runner.hpp"

namespace housedyn {
namespace {

using nlohmann::json;
using testing::config_path;
using testing::fixture;
using testing::model_path;
using testing::read_file;
using testing::run_cli;
using testing::TempDir;

json read_json(const std::filesystem::path& p) { return json::parse(read_file(p)); }

json series_spec(const std::filesystem::path& p, const std::string& name, const std::string& freq = "quarterly") {
  return {{"name", name}, {"path", p.string()}, {"frequency", freq}};
}

// Quarter-end dates from 2015 through 2024.
std::vector<std::string> quarter_ends() {
  std::vector<std::string> out;
  for (int y = 2015; y <= 2024; ++y) {
    for (const char* md : {"-03-31", "-06-30", "-09-30", "-12-31"}) out.push_back(std::to_string(y) + md);
  }
  return out;
}

TEST(CliExplore, ExactLinearDriverGivesTinyPValue) {
  TempDir dir;
  std::string price = "date,value\n", driver = "date,value\n";
  const auto dates = quarter_ends();
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const double x = 3.0 + 0.37 * static_cast<double>(i) + 0.05 * static_cast<double>((i * 7) % 5);
    driver += dates[i] + ',' + std::to_string(x) + '\n';
    price += dates[i] + ',' + std::to_string(100.0 + 4.0 * x) + '\n';
  }
  const json cfg = {{"series",
                     {{"price", series_spec(dir.write("price.csv", price), "price")},
                      {"drivers", {series_spec(dir.write("driver.csv", driver), "driver")}}}}};
  const auto config = dir.write("config.json", cfg.dump());
  const auto r = run_cli({"explore", "--config", config.string(), "--out", (dir.path() / "out").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto report = read_json(dir.path() / "out" / "explore.json");
  ASSERT_EQ(report["drivers"].size(), 1u);
  for (const char* side : {"before_cut", "after_cut"}) {
    const auto& reg = report["drivers"][0][side]["regression"];
    EXPECT_LT(reg["p_value"].get<double>(), 1e-9) << side;
    EXPECT_NEAR(reg["slope"].get<double>(), 4.0, 1e-6) << side;
  }
}

TEST(CliExplore, FixtureConfigScreensEveryDriver) {
  TempDir dir;
  const auto r = run_cli({"explore", "--config", config_path(), "--out", dir.path().string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto report = read_json(dir.path() / "explore.json");
  EXPECT_EQ(report["cut_date"], "2020-01-01");
  ASSERT_EQ(report["drivers"].size(), 3u);
  for (const auto& d : report["drivers"]) {
    EXPECT_GT(d["before_cut"]["n"].get<int>(), 2);
    EXPECT_GT(d["after_cut"]["n"].get<int>(), 2);
  }
}

TEST(CliExplore, CutDateFlagOverridesConfig) {
  TempDir dir;
  const auto r =
      run_cli({"explore", "--config", config_path(), "--out", dir.path().string(), "--cut-date", "2018-01-01"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(read_json(dir.path() / "explore.json")["cut_date"], "2018-01-01");
}

TEST(CliExplore, MissingFileExitsTwo) {
  TempDir dir;
  const json cfg = {{"series",
                     {{"price", series_spec(dir.path() / "absent.csv", "price")},
                      {"drivers", {series_spec(fixture("completions_quarterly.csv"), "completions")}}}}};
  const auto r = run_cli({"explore", "--config", dir.write("c.json", cfg.dump()).string(), "--out",
                          (dir.path() / "out").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("absent.csv"), std::string::npos) << r.err;
}

TEST(CliExplore, DisjointDatesExitTwo) {
  TempDir dir;
  const auto a = dir.write("a.csv", "date,value\n2010-03-31,1\n2010-06-30,2\n2010-09-30,3\n");
  const auto b = dir.write("b.csv", "date,value\n2020-03-31,1\n2020-06-30,2\n2020-09-30,3\n");
  const json cfg = {{"series", {{"price", series_spec(a, "price")}, {"drivers", {series_spec(b, "driver")}}}}};
  const auto r = run_cli({"explore", "--config", dir.write("c.json", cfg.dump()).string(), "--out",
                          (dir.path() / "out").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("no overlapping dates"), std::string::npos) << r.err;
}

TEST(CliConfig, UnknownKeyAndMissingConfigExitTwo) {
  TempDir dir;
  auto r = run_cli({"explore", "--config", dir.write("c.json", R"({"serie": {}})").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("unknown key 'serie'"), std::string::npos) << r.err;

  r = run_cli({"explore", "--config", (dir.path() / "none.json").string()});
  EXPECT_EQ(r.exit_code, 2);

  r = run_cli({"explore", "--config", dir.write("bad.json", "{").string()});
  EXPECT_EQ(r.exit_code, 2);
}

TEST(CliConfig, UsageErrorsExitTwoAndHelpExitsZero) {
  EXPECT_EQ(run_cli({}).exit_code, 2);
  EXPECT_EQ(run_cli({"bogus"}).exit_code, 2);
  EXPECT_EQ(run_cli({"simulate", "--dt", "fast"}).exit_code, 2);
  EXPECT_EQ(run_cli({"--help"}).exit_code, 0);
  EXPECT_EQ(run_cli({"scenario", "--help"}).exit_code, 0);
}

TEST(CliSimulate, WritesRowsAtEveryStepAndUniquePeak) {
  TempDir dir;
  const auto r = run_cli({"simulate", "--config", config_path(), "--out", dir.path().string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto csv = read_file(dir.path() / "trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,Y,S,D,alpha");
  const auto summary = read_json(dir.path() / "simulate_summary.json");
  const double t_end = summary["final"]["t"].get<double>();
  const auto rows = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
  EXPECT_EQ(rows, static_cast<std::size_t>(std::llround(t_end / 0.05)) + 1);
  EXPECT_EQ(summary["rows"].get<std::size_t>(), rows);
  EXPECT_TRUE(summary["unique_alpha_peak"].get<bool>());
  EXPECT_TRUE(summary["alpha_declines_after_peak"].get<bool>());
  EXPECT_GT(summary["peak_alpha"]["alpha"].get<double>(), 0.5);
  EXPECT_LT(summary["final"]["alpha"].get<double>(), 0.5);
}

TEST(CliSimulate, EndBeforeStartExitsTwo) {
  TempDir dir;
  const auto r = run_cli({"simulate", "--config", config_path(), "--out", dir.path().string(), "--from",
                          "2016-03-31", "--to", "2015-03-31"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("precedes"), std::string::npos) << r.err;
}

TEST(CliSimulate, MissingRateCoverageExitsTwo) {
  TempDir dir;
  auto r = run_cli({"simulate", "--config", config_path(), "--out", dir.path().string(), "--to", "2030-12-31"});
  EXPECT_EQ(r.exit_code, 2);
  r = run_cli({"simulate", "--config", config_path(), "--out", dir.path().string(), "--from", "2005-03-31",
               "--y0", "400"});
  EXPECT_EQ(r.exit_code, 2);
}

TEST(CliSimulate, BlowUpExitsThreeWithTime) {
  TempDir dir;
  json cfg = json::parse(read_file(config_path()));
  for (auto& item : cfg["series"].items()) {
    if (item.value().is_object()) {
      item.value()["path"] = (std::filesystem::path(HOUSEDYN_DATA_DIR) / item.value()["path"].get<std::string>()).string();
    } else {
      for (auto& d : item.value()) {
        d["path"] = (std::filesystem::path(HOUSEDYN_DATA_DIR) / d["path"].get<std::string>()).string();
      }
    }
  }
  cfg["model"] = {{"b", 1e5}};
  cfg["scenario"].erase("model");
  const auto r = run_cli({"simulate", "--config", dir.write("c.json", cfg.dump()).string(), "--out",
                          (dir.path() / "out").string(), "--dt", "0.5"});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("blow-up at t="), std::string::npos) << r.err;
}

TEST(CliFit, LogisticAndOdeWriteReports) {
  TempDir dir;
  auto r = run_cli({"fit-logistic", "--config", config_path(), "--out", dir.path().string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto logistic = read_json(dir.path() / "logistic_fit.json");
  EXPECT_TRUE(std::isfinite(logistic["sse"].get<double>()));
  EXPECT_GT(logistic["n_pairs"].get<int>(), 6);

  r = run_cli({"fit-ode", "--config", config_path(), "--out", dir.path().string(), "--restarts", "2"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto ode = read_json(dir.path() / "ode_fit.json");
  EXPECT_TRUE(std::isfinite(ode["sse"].get<double>()));
  EXPECT_EQ(ode["free"], json({"k", "c"}));
}

TEST(CliFitGev, TwoWindowsWithDiagnostics) {
  TempDir dir;
  const auto r = run_cli({"fit-gev", "--config", config_path(), "--out", dir.path().string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  for (const char* name : {"2014-2019", "2021-2025"}) {
    const auto model = read_json(dir.path() / (std::string("gev_") + name + ".json"));
    for (const char* key : {"ad_p", "ks_p"}) {
      const double p = model["diagnostics"][key].get<double>();
      EXPECT_GE(p, 0.0) << name << ' ' << key;
      EXPECT_LE(p, 1.0) << name << ' ' << key;
    }
    EXPECT_GE(model["n_blocks"].get<int>(), 30);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / (std::string("block_maxima_") + name + ".csv")));
  }
}

TEST(CliFitGev, ExcludedYearAloneExitsTwo) {
  TempDir dir;
  const auto r = run_cli({"fit-gev", "--config", config_path(), "--out", dir.path().string(), "--from",
                          "2020-01-01", "--to", "2020-12-31"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "gev_2020-2020.json"));
}

TEST(CliDeterminism, SeededRunsAreByteIdentical) {
  TempDir a, b;
  for (const auto* dir : {&a, &b}) {
    for (const char* cmd : {"explore", "simulate", "fit-logistic", "fit-gev"}) {
      const auto r = run_cli({cmd, "--config", config_path(), "--out", dir->path().string(), "--seed", "7"});
      ASSERT_EQ(r.exit_code, 0) << cmd << ": " << r.err;
    }
  }
  std::size_t compared = 0;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    const auto other = b.path() / entry.path().filename();
    ASSERT_TRUE(std::filesystem::exists(other)) << other;
    EXPECT_EQ(read_file(entry.path()), read_file(other)) << entry.path().filename();
    ++compared;
  }
  EXPECT_EQ(compared, 8u);
}

std::vector<std::string> scenario_args(const std::string& model, const std::string& cpi, const TempDir& dir) {
  return {"scenario", "--model", model_path(model), "--out", dir.path().string(), "--baseline-rate", "6.0",
          "--baseline-cpi", cpi, "--d-rate", "1.0", "--d-cpi", "10.0"};
}

TEST(CliScenario, PublishedDirections) {
  TempDir dir;
  auto r = run_cli(scenario_args("published_post2020.json", "130", dir));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("direction: rightward"), std::string::npos) << r.out;
  auto result = read_json(dir.path() / "scenario.json");
  EXPECT_EQ(result["direction"], "rightward");
  EXPECT_NEAR(result["d_mu"].get<double>(), -2.75 * std::log(7.0 / 6.0) + 2.0, 1e-9);
  const auto csv = read_file(dir.path() / "scenario_density.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,baseline,shifted");

  r = run_cli(scenario_args("published_pre2020.json", "110", dir));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("direction: leftward"), std::string::npos) << r.out;
  result = read_json(dir.path() / "scenario.json");
  EXPECT_NEAR(result["d_mu"].get<double>(), -0.54 * std::log(7.0 / 6.0) - 1.3, 1e-9);
}

TEST(CliScenario, OffsetPrintsClosedFormThreshold) {
  TempDir dir;
  auto args = scenario_args("published_post2020.json", "130", dir);
  args.emplace_back("--offset");
  const auto r = run_cli(args);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const double expected = 6.0 * std::expm1(-0.20 * 10.0 / -2.75);
  const auto pos = r.out.find("offsetting rate increase: ");
  ASSERT_NE(pos, std::string::npos) << r.out;
  EXPECT_NEAR(std::stod(r.out.substr(pos + 26)), expected, 1e-9);
  EXPECT_NEAR(read_json(dir.path() / "scenario.json")["offsetting_rate_increase"].get<double>(), expected, 1e-9);
}

TEST(CliScenario, InfeasibleOrIncompleteInputsExitTwo) {
  TempDir dir;
  auto args = scenario_args("published_post2020.json", "130", dir);
  args[6] = "0";  // baseline rate
  EXPECT_EQ(run_cli(args).exit_code, 2);

  // Pre-2020 scale 1.21 - 0.01 cpi is non-positive at cpi 125.
  EXPECT_EQ(run_cli(scenario_args("published_pre2020.json", "125", dir)).exit_code, 2);

  auto missing = scenario_args("published_post2020.json", "130", dir);
  missing.resize(missing.size() - 2);
  const auto r = run_cli(missing);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("--d-cpi"), std::string::npos) << r.err;

  auto no_model = scenario_args("published_post2020.json", "130", dir);
  no_model[2] = (dir.path() / "absent.json").string();
  EXPECT_EQ(run_cli(no_model).exit_code, 2);
}

}  // namespace
}  // namespace housedyn
