#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "housedyn/calibration.hpp"
#include "housedyn/error.hpp"
#include "housedyn/evt.hpp"
#include "housedyn/exploratory.hpp"
#include "housedyn/json.hpp"
#include "housedyn/scenario.hpp"

namespace housedyn::cli {

namespace {

using nlohmann::json;

const SeriesSpec& require(const std::optional<SeriesSpec>& spec, const char* key) {
  if (!spec) fail(ErrorKind::kValidation, std::string("config: missing series.") + key);
  return *spec;
}

TimeSeries load(const SeriesSpec& spec) { return load_csv(spec.path, spec.frequency, spec.name); }

TimeSeries load_quarterly(const SeriesSpec& spec) {
  auto s = load(spec);
  return s.frequency() == Frequency::kQuarterly ? s : resample(s, Frequency::kQuarterly, spec.resample);
}

void write_text(const std::filesystem::path& path, const std::string& text, std::ostream& log) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorKind::kValidation, "cannot write " + path.string());
  log << "wrote " << path.string() << '\n';
}

void write_json(const std::filesystem::path& path, const json& j, std::ostream& log) {
  write_text(path, j.dump(2) + '\n', log);
}

// Inclusive bounds; without an upper bound the window ends before the cut date.
bool in_window(const Date& d, const DateWindow& w, const Date& cut) {
  if (w.from && d < *w.from) return false;
  return w.to ? d <= *w.to : d < cut;
}

json window_json(const DateWindow& w, const Date& cut) {
  json j;
  j["from"] = w.from ? json(format_date(*w.from)) : json(nullptr);
  j["to"] = w.to ? json(format_date(*w.to)) : json(nullptr);
  if (!w.to) j["before"] = format_date(cut);
  return j;
}

TimeSeries in_window(const TimeSeries& s, const DateWindow& w, const Date& cut) {
  std::vector<Observation> pts;
  for (const auto& p : s.points()) {
    if (in_window(p.date, w, cut)) pts.push_back(p);
  }
  return TimeSeries(s.name(), s.frequency(), std::move(pts));
}

std::string format_month(std::chrono::year_month ym) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ym.year()), static_cast<unsigned>(ym.month()));
  return buf;
}

void check_file_name(const std::string& name) {
  const bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.';
  });
  if (!ok) fail(ErrorKind::kValidation, "window name '" + name + "' is not a valid file name part");
}

}  // namespace

void cmd_explore(const RunConfig& config, std::ostream& log) {
  const auto& target_spec = require(config.price, "price");
  const auto target = load_quarterly(target_spec);
  std::vector<SeriesSpec> drivers = config.drivers;
  if (drivers.empty() && config.rate) drivers.push_back(*config.rate);
  if (drivers.empty()) fail(ErrorKind::kValidation, "config: no driver series to screen");

  json screens = json::array();
  for (const auto& spec : drivers) {
    if (spec.name == target.name()) fail(ErrorKind::kValidation, "driver '" + spec.name + "' has the target's name");
    const std::vector<TimeSeries> pair{target, load_quarterly(spec)};
    const auto frame = align(pair);
    screens.push_back(screen_driver(frame, target.name(), spec.name, config.cut_date));
  }
  json out;
  out["target"] = target.name();
  out["cut_date"] = format_date(config.cut_date);
  out["drivers"] = screens;
  write_json(config.out / "explore.json", out, log);
}

void cmd_simulate(const RunConfig& config, std::ostream& log) {
  const auto rates = load_quarterly(require(config.rate, "rate"));
  if (rates.empty()) fail(ErrorKind::kValidation, "rate series is empty");
  const Date epoch = rates.points().front().date;
  const auto path = RatePath::from_series(rates, epoch);

  const Date from = config.simulate_window.from.value_or(epoch);
  const Date to = config.simulate_window.to.value_or(rates.points().back().date);
  const double t0 = quarters_since(epoch, from);
  const double t1 = quarters_since(epoch, to);
  if (t1 < t0) fail(ErrorKind::kDomain, "simulation end " + format_date(to) + " precedes start " + format_date(from));

  double y0 = 0.0;
  if (config.y0) {
    y0 = *config.y0;
  } else {
    const auto price = load_quarterly(require(config.price, "price"));
    const auto it = std::find_if(price.points().begin(), price.points().end(), [&](const Observation& p) {
      return period_index(p.date, Frequency::kQuarterly) == period_index(from, Frequency::kQuarterly);
    });
    if (it == price.points().end()) {
      fail(ErrorKind::kValidation, "no price observation in the start quarter; set initial.Y0");
    }
    y0 = it->value;
  }

  const auto traj = simulate({t0, y0, config.s0, config.d0}, path, config.model, t1, config.dt);
  write_text(config.out / "trajectory.csv", trajectory_csv(traj), log);

  const auto& pts = traj.points;
  std::size_t peak = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].alpha > pts[peak].alpha) peak = i;
  }
  std::size_t local_maxima = 0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (pts[i].alpha > pts[i - 1].alpha && pts[i].alpha >= pts[i + 1].alpha) ++local_maxima;
  }
  bool declines = true;
  for (std::size_t i = peak + 1; i < pts.size(); ++i) declines = declines && pts[i].alpha < pts[i - 1].alpha;

  json summary;
  summary["epoch"] = format_date(epoch);
  summary["from"] = format_date(from);
  summary["to"] = format_date(to);
  summary["dt"] = config.dt;
  summary["rows"] = pts.size();
  summary["initial"] = {{"t", t0}, {"Y", y0}, {"S", config.s0}, {"D", config.d0}};
  summary["params"] = config.model;
  summary["peak_alpha"] = {{"t", pts[peak].state.t}, {"alpha", pts[peak].alpha}};
  summary["alpha_local_maxima"] = local_maxima;
  summary["unique_alpha_peak"] = local_maxima == 1;
  summary["alpha_declines_after_peak"] = declines;
  const auto& last = pts.back();
  summary["final"] = {{"t", last.state.t},
                      {"Y", last.state.price},
                      {"S", last.state.supply},
                      {"D", last.state.demand},
                      {"alpha", last.alpha}};
  summary["supply_clamps"] = traj.supply_clamps;
  write_json(config.out / "simulate_summary.json", summary, log);
  log << "peak alpha " << format_double(pts[peak].alpha) << " at t=" << format_double(pts[peak].state.t)
      << "; final Y " << format_double(last.state.price) << '\n';
}

void cmd_fit_logistic(const RunConfig& config, std::ostream& log) {
  const auto price = load_quarterly(require(config.price, "price"));
  const auto rate = load_quarterly(require(config.rate, "rate"));
  const std::vector<TimeSeries> both{price.renamed("price"), rate.renamed("rate")};
  const auto frame = align(both);
  std::vector<RatePricePair> pairs;
  for (std::size_t i = 0; i < frame.dates.size(); ++i) {
    if (in_window(frame.dates[i], config.logistic_window, config.cut_date)) {
      pairs.push_back({frame.column("rate").values[i], frame.column("price").values[i]});
    }
  }
  FitOptions options;
  options.restarts = config.logistic_restarts;
  options.seed = config.seed;
  const auto report = fit_logistic(pairs, config.logistic_init, default_logistic_bounds(), options);
  if (!std::isfinite(report.sse)) fail(ErrorKind::kNumerical, "logistic fit produced a non-finite loss");

  json out = report;
  out["window"] = window_json(config.logistic_window, config.cut_date);
  out["n_pairs"] = pairs.size();
  out["seed"] = config.seed;
  write_json(config.out / "logistic_fit.json", out, log);
  log << "logistic fit: sse " << format_double(report.sse) << (report.converged ? "" : " (not converged)") << '\n';
}

void cmd_fit_ode(const RunConfig& config, std::ostream& log) {
  const auto rates = load_quarterly(require(config.rate, "rate"));
  if (rates.empty()) fail(ErrorKind::kValidation, "rate series is empty");
  const auto price = load_quarterly(require(config.price, "price"));
  const Date epoch = rates.points().front().date;
  const auto observed = in_window(price, config.ode_window, config.cut_date);
  if (observed.empty()) fail(ErrorKind::kValidation, "no price observations in the fit window");

  const auto& first = observed.points().front();
  const SystemState initial{quarters_since(epoch, first.date), config.y0.value_or(first.value), config.s0, config.d0};
  std::map<std::string, Interval> bounds;
  for (const auto& name : config.ode_free) {
    const auto it = config.ode_bounds.find(name);
    if (it != config.ode_bounds.end()) bounds[name] = it->second;
  }
  const OdeFitProblem problem{observed, RatePath::from_series(rates, epoch), epoch, initial, config.model,
                              config.ode_free, bounds};
  FitOptions options;
  options.restarts = config.ode_restarts;
  options.seed = config.seed;
  options.dt = config.dt;
  const auto report = fit_ode(problem, options);
  if (!std::isfinite(report.sse)) fail(ErrorKind::kNumerical, "every candidate simulation failed during the ODE fit");

  json out = report;
  out["window"] = window_json(config.ode_window, config.cut_date);
  out["epoch"] = format_date(epoch);
  out["initial"] = {{"t", initial.t}, {"Y", initial.price}, {"S", initial.supply}, {"D", initial.demand}};
  out["seed"] = config.seed;
  write_json(config.out / "ode_fit.json", out, log);
  log << "ODE fit: sse " << format_double(report.sse) << (report.converged ? "" : " (not converged)") << '\n';
}

void cmd_fit_gev(const RunConfig& config, std::ostream& log) {
  const auto daily = load(require(config.daily_price, "daily_price"));
  if (daily.frequency() != Frequency::kDaily) fail(ErrorKind::kValidation, "series.daily_price must be daily");
  const std::vector<TimeSeries> cov{load(require(config.cpi, "cpi")).renamed("cpi"),
                                    load(require(config.rate_monthly, "rate_monthly")).renamed("rate")};
  if (cov[0].frequency() != Frequency::kMonthly || cov[1].frequency() != Frequency::kMonthly) {
    fail(ErrorKind::kValidation, "series.cpi and series.rate_monthly must be monthly");
  }
  const auto covariates = align(cov);
  if (config.gev_windows.empty()) fail(ErrorKind::kValidation, "config: no GEV windows");

  struct Output {
    std::string name;
    json model;
    std::string blocks_csv;
  };
  std::vector<Output> outputs;
  for (const auto& w : config.gev_windows) {
    check_file_name(w.name);
    if (w.to < w.from) fail(ErrorKind::kValidation, "GEV window " + w.name + " ends before it starts");
    const auto data = block_maxima(daily.slice(w.from, w.to), covariates, config.min_block_size);
    if (data.blocks.size() < config.min_blocks) {
      fail(ErrorKind::kDomain, "GEV window " + w.name + " has " + std::to_string(data.blocks.size()) +
                                   " monthly blocks; at least " + std::to_string(config.min_blocks) + " required");
    }
    GevFitOptions options;
    options.restarts = config.gev_restarts;
    options.seed = config.seed;
    options.min_blocks = config.min_blocks;
    const auto start = moment_start(data);
    const auto full = fit_gev(data, start, options);
    if (!std::isfinite(full.nll)) fail(ErrorKind::kNumerical, "GEV fit for " + w.name + " found no feasible point");

    // Stationary model: covariate slopes held at zero.
    options.free = {true, false, false, true, false, true};
    const auto stationary = fit_gev(data, start, options);

    json j = full;
    j["window"] = {{"name", w.name}, {"from", format_date(w.from)}, {"to", format_date(w.to)}};
    json lrt = {{"nested", "stationary (mu1 = mu2 = sigma1 = 0)"}, {"df", 3}, {"nested_nll", stationary.nll}};
    try {
      lrt["deviance"] = std::max(0.0, 2.0 * (stationary.nll - full.nll));
      lrt["p_value"] = lr_test(stationary.nll, full.nll, 3);
    } catch (const Error& e) {
      lrt["p_value"] = nullptr;
      lrt["error"] = e.what();
    }
    j["lrt"] = lrt;
    json dropped = json::array();
    for (const auto& d : data.dropped) dropped.push_back({{"month", format_month(d.period)}, {"n_obs", d.n_obs}});
    j["dropped_months"] = dropped;
    j["min_block_size"] = config.min_block_size;
    j["seed"] = config.seed;
    j["restarts"] = config.gev_restarts;
    j["block_maxima_csv"] = "block_maxima_" + w.name + ".csv";
    outputs.push_back({w.name, j, block_maxima_csv(data)});
  }
  for (const auto& o : outputs) {
    write_text(config.out / ("block_maxima_" + o.name + ".csv"), o.blocks_csv, log);
    write_json(config.out / ("gev_" + o.name + ".json"), o.model, log);
  }
}

void cmd_scenario(const RunConfig& config, const ScenarioFlags& flags, std::ostream& log) {
  if (!config.scenario_model) fail(ErrorKind::kValidation, "scenario needs --model or scenario.model");
  const auto need = [](const std::optional<double>& v, const char* flag) {
    if (!v) fail(ErrorKind::kValidation, std::string("scenario needs ") + flag);
    return *v;
  };
  const double baseline_rate = need(config.baseline_rate, "--baseline-rate");
  const double baseline_cpi = need(config.baseline_cpi, "--baseline-cpi");
  const double d_rate = need(config.d_rate, "--d-rate");
  const double d_cpi = need(config.d_cpi, "--d-cpi");

  std::ifstream in(*config.scenario_model);
  if (!in) fail(ErrorKind::kValidation, "cannot open model " + config.scenario_model->string());
  GevModel model;
  try {
    json::parse(in).get_to(model);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, "model " + config.scenario_model->string() + ": " + e.what());
  }

  const auto result = shift(model.coefficients, baseline_rate, baseline_cpi, d_rate, d_cpi);
  json out = result;
  out["model"] = model.coefficients;
  if (flags.offset) out["offsetting_rate_increase"] = offsetting_rate_increase(model.coefficients, baseline_rate, d_cpi);
  write_json(config.out / "scenario.json", out, log);
  write_text(config.out / "scenario_density.csv", density_csv(result), log);

  log << "direction: " << to_string(result.direction) << '\n';
  log << "d_mu: " << format_double(result.d_mu) << '\n';
  if (flags.offset) {
    log << "offsetting rate increase: " << format_double(out["offsetting_rate_increase"].get<double>())
        << " rate-points at baseline " << format_double(baseline_rate) << "%\n";
  }
}

}  // namespace housedyn::cli
