#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <iostream>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "housedyn/error.hpp"

namespace {

using housedyn::Date;
using housedyn::cli::RunConfig;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string cut_date;

  std::string from;
  std::string to;
  std::optional<double> dt;
  std::optional<double> y0;
  std::optional<int> restarts;
  std::optional<std::size_t> min_block_size;

  std::string model;
  std::optional<double> baseline_rate;
  std::optional<double> baseline_cpi;
  std::optional<double> d_rate;
  std::optional<double> d_cpi;
  bool offset = false;
};

void add_window(CLI::App* sub, Overrides& o) {
  sub->add_option("--from", o.from, "First date of the window (YYYY-MM-DD)");
  sub->add_option("--to", o.to, "Last date of the window (YYYY-MM-DD)");
}

RunConfig build_config(const Overrides& o, const std::string& command) {
  using housedyn::parse_date;
  RunConfig c = o.config.empty() ? housedyn::cli::default_config() : housedyn::cli::load_config(o.config);
  if (!o.out.empty()) c.out = o.out;
  if (o.seed) c.seed = *o.seed;
  if (!o.cut_date.empty()) c.cut_date = parse_date(o.cut_date);

  std::optional<Date> from;
  std::optional<Date> to;
  if (!o.from.empty()) from = parse_date(o.from);
  if (!o.to.empty()) to = parse_date(o.to);
  auto apply = [&](housedyn::cli::DateWindow& w) {
    if (from) w.from = from;
    if (to) w.to = to;
  };

  if (command == "simulate") {
    apply(c.simulate_window);
    if (o.dt) c.dt = *o.dt;
    if (o.y0) c.y0 = o.y0;
  } else if (command == "fit-logistic") {
    apply(c.logistic_window);
    if (o.restarts) c.logistic_restarts = *o.restarts;
  } else if (command == "fit-ode") {
    apply(c.ode_window);
    if (o.restarts) c.ode_restarts = *o.restarts;
  } else if (command == "fit-gev") {
    if (from || to) {
      if (!from || !to) housedyn::fail(housedyn::ErrorKind::kValidation, "fit-gev needs both --from and --to");
      c.gev_windows = {{o.from.substr(0, 4) + "-" + o.to.substr(0, 4), *from, *to}};
    }
    if (o.min_block_size) c.min_block_size = *o.min_block_size;
    if (o.restarts) c.gev_restarts = *o.restarts;
  } else if (command == "scenario") {
    if (!o.model.empty()) c.scenario_model = o.model;
    if (o.baseline_rate) c.baseline_rate = o.baseline_rate;
    if (o.baseline_cpi) c.baseline_cpi = o.baseline_cpi;
    if (o.d_rate) c.d_rate = o.d_rate;
    if (o.d_cpi) c.d_cpi = o.d_cpi;
  }
  if (c.dt <= 0.0) housedyn::fail(housedyn::ErrorKind::kValidation, "dt must be positive");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Housing price dynamics: screening, ODE model, calibration and extreme-value scenarios"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--seed", o.seed, "Random seed for multi-start fits");
  app.add_option("--cut-date", o.cut_date, "Regime split date (YYYY-MM-DD)");

  app.add_subcommand("explore", "Screen candidate drivers before and after the cut date");

  auto* simulate = app.add_subcommand("simulate", "Integrate the price-supply-demand system");
  add_window(simulate, o);
  simulate->add_option("--dt", o.dt, "RK4 step in quarters");
  simulate->add_option("--y0", o.y0, "Initial price");

  auto* logistic = app.add_subcommand("fit-logistic", "Fit the rate-price logistic curve");
  add_window(logistic, o);
  logistic->add_option("--restarts", o.restarts, "Multi-start restarts");

  auto* ode = app.add_subcommand("fit-ode", "Fit free ODE parameters to observed prices");
  add_window(ode, o);
  ode->add_option("--restarts", o.restarts, "Multi-start restarts");

  auto* gev = app.add_subcommand("fit-gev", "Fit the nonstationary GEV model to monthly block maxima");
  add_window(gev, o);
  gev->add_option("--min-block-size", o.min_block_size, "Fewest daily observations for a monthly block");
  gev->add_option("--restarts", o.restarts, "Multi-start restarts");

  auto* scenario = app.add_subcommand("scenario", "Shift a fitted GEV model under a rate/CPI scenario");
  scenario->add_option("--model", o.model, "Fitted GEV model JSON");
  scenario->add_option("--baseline-rate", o.baseline_rate, "Baseline mortgage rate, percent");
  scenario->add_option("--baseline-cpi", o.baseline_cpi, "Baseline CPI, index points");
  scenario->add_option("--d-rate", o.d_rate, "Change in mortgage rate, rate-points");
  scenario->add_option("--d-cpi", o.d_cpi, "Change in CPI, index points");
  scenario->add_flag("--offset", o.offset, "Report the rate increase that cancels the CPI effect");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig config = build_config(o, command);
    if (command == "explore") {
      housedyn::cli::cmd_explore(config, std::cout);
    } else if (command == "simulate") {
      housedyn::cli::cmd_simulate(config, std::cout);
    } else if (command == "fit-logistic") {
      housedyn::cli::cmd_fit_logistic(config, std::cout);
    } else if (command == "fit-ode") {
      housedyn::cli::cmd_fit_ode(config, std::cout);
    } else if (command == "fit-gev") {
      housedyn::cli::cmd_fit_gev(config, std::cout);
    } else {
      housedyn::cli::cmd_scenario(config, {o.offset}, std::cout);
    }
  } catch (const housedyn::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == housedyn::ErrorKind::kNumerical ? kExitNumerical : kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
