#include "config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "housedyn/error.hpp"
#include "housedyn/json.hpp"

namespace housedyn::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::kValidation, "config: " + what); }

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) bad("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T value_at(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad("invalid value for '" + key + "' in " + where);
  }
}

Date date_at(const json& j, const std::string& key, const std::string& where) {
  return parse_date(value_at<std::string>(j, key, where));
}

void read_window(const json& j, const std::string& where, DateWindow& w) {
  if (j.contains("from")) w.from = date_at(j, "from", where);
  if (j.contains("to")) w.to = date_at(j, "to", where);
}

SeriesSpec read_series(const json& j, const std::string& where, const std::filesystem::path& base,
                       const std::string& default_name) {
  check_keys(j, where, {"name", "path", "frequency", "resample"});
  SeriesSpec s;
  s.name = j.contains("name") ? value_at<std::string>(j, "name", where) : default_name;
  const std::filesystem::path p = value_at<std::string>(j, "path", where);
  s.path = p.is_absolute() ? p : base / p;
  s.frequency = parse_frequency(value_at<std::string>(j, "frequency", where));
  if (j.contains("resample")) s.resample = parse_resample_method(value_at<std::string>(j, "resample", where));
  return s;
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.ode_bounds = {{"k", {0.0, 200.0}}, {"c", {0.0, 10.0}}};
  c.gev_windows = {{"2014-2019", parse_date("2014-01-01"), parse_date("2019-12-31")},
                   {"2021-2025", parse_date("2021-01-01"), parse_date("2025-12-31")}};
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kValidation, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kParse, "config " + path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  RunConfig c = default_config();
  check_keys(j, "config", {"series", "out", "seed", "cut_date", "model", "initial", "simulate", "fit_logistic",
                           "fit_ode", "gev", "scenario"});

  if (j.contains("series")) {
    const auto& s = j.at("series");
    check_keys(s, "series", {"price", "rate", "drivers", "daily_price", "cpi", "rate_monthly"});
    if (s.contains("price")) c.price = read_series(s.at("price"), "series.price", base, "price");
    if (s.contains("rate")) c.rate = read_series(s.at("rate"), "series.rate", base, "rate");
    if (s.contains("daily_price")) {
      c.daily_price = read_series(s.at("daily_price"), "series.daily_price", base, "daily_price");
    }
    if (s.contains("cpi")) c.cpi = read_series(s.at("cpi"), "series.cpi", base, "cpi");
    if (s.contains("rate_monthly")) {
      c.rate_monthly = read_series(s.at("rate_monthly"), "series.rate_monthly", base, "rate");
    }
    if (s.contains("drivers")) {
      if (!s.at("drivers").is_array()) bad("series.drivers must be an array");
      for (const auto& d : s.at("drivers")) {
        if (!d.contains("name")) bad("every driver needs a name");
        c.drivers.push_back(read_series(d, "series.drivers", base, ""));
      }
    }
  }
  if (j.contains("out")) {
    const std::filesystem::path out = value_at<std::string>(j, "out", "config");
    c.out = out.is_absolute() ? out : base / out;
  }
  if (j.contains("seed")) c.seed = value_at<std::uint64_t>(j, "seed", "config");
  if (j.contains("cut_date")) c.cut_date = date_at(j, "cut_date", "config");

  if (j.contains("model")) {
    check_keys(j.at("model"), "model", {"k", "C", "r", "K", "c", "c_s", "a", "b", "G"});
    try {
      from_json(j.at("model"), c.model);
    } catch (const json::exception&) {
      bad("invalid model parameters");
    }
  }
  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    check_keys(i, "initial", {"Y0", "S0", "D0"});
    if (i.contains("Y0") && !i.at("Y0").is_null()) c.y0 = value_at<double>(i, "Y0", "initial");
    if (i.contains("S0")) c.s0 = value_at<double>(i, "S0", "initial");
    if (i.contains("D0")) c.d0 = value_at<double>(i, "D0", "initial");
  }
  if (j.contains("simulate")) {
    const auto& s = j.at("simulate");
    check_keys(s, "simulate", {"from", "to", "dt"});
    read_window(s, "simulate", c.simulate_window);
    if (s.contains("dt")) c.dt = value_at<double>(s, "dt", "simulate");
  }
  if (j.contains("fit_logistic")) {
    const auto& s = j.at("fit_logistic");
    check_keys(s, "fit_logistic", {"from", "to", "init", "restarts"});
    read_window(s, "fit_logistic", c.logistic_window);
    if (s.contains("init")) {
      check_keys(s.at("init"), "fit_logistic.init", {"A", "B", "Q", "g", "M", "nu"});
      from_json(s.at("init"), c.logistic_init);
    }
    if (s.contains("restarts")) c.logistic_restarts = value_at<int>(s, "restarts", "fit_logistic");
  }
  if (j.contains("fit_ode")) {
    const auto& s = j.at("fit_ode");
    check_keys(s, "fit_ode", {"from", "to", "free", "bounds", "restarts"});
    read_window(s, "fit_ode", c.ode_window);
    if (s.contains("free")) c.ode_free = value_at<std::vector<std::string>>(s, "free", "fit_ode");
    if (s.contains("bounds")) {
      c.ode_bounds.clear();
      for (const auto& item : s.at("bounds").items()) {
        const std::string name = item.key();
        const auto pair = value_at<std::vector<double>>(s.at("bounds"), name, "fit_ode.bounds");
        if (pair.size() != 2 || !(pair[0] <= pair[1])) bad("bounds for '" + name + "' must be [lower, upper]");
        c.ode_bounds[name] = {pair[0], pair[1]};
      }
    }
    if (s.contains("restarts")) c.ode_restarts = value_at<int>(s, "restarts", "fit_ode");
  }
  if (j.contains("gev")) {
    const auto& s = j.at("gev");
    check_keys(s, "gev", {"windows", "min_block_size", "min_blocks", "restarts"});
    if (s.contains("windows")) {
      c.gev_windows.clear();
      for (const auto& w : s.at("windows")) {
        check_keys(w, "gev.windows", {"name", "from", "to"});
        c.gev_windows.push_back({value_at<std::string>(w, "name", "gev.windows"), date_at(w, "from", "gev.windows"),
                                 date_at(w, "to", "gev.windows")});
      }
    }
    if (s.contains("min_block_size")) c.min_block_size = value_at<std::size_t>(s, "min_block_size", "gev");
    if (s.contains("min_blocks")) c.min_blocks = value_at<std::size_t>(s, "min_blocks", "gev");
    if (s.contains("restarts")) c.gev_restarts = value_at<int>(s, "restarts", "gev");
  }
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    check_keys(s, "scenario", {"model", "baseline_rate", "baseline_cpi", "d_rate", "d_cpi"});
    if (s.contains("model")) {
      const std::filesystem::path m = value_at<std::string>(s, "model", "scenario");
      c.scenario_model = m.is_absolute() ? m : base / m;
    }
    if (s.contains("baseline_rate")) c.baseline_rate = value_at<double>(s, "baseline_rate", "scenario");
    if (s.contains("baseline_cpi")) c.baseline_cpi = value_at<double>(s, "baseline_cpi", "scenario");
    if (s.contains("d_rate")) c.d_rate = value_at<double>(s, "d_rate", "scenario");
    if (s.contains("d_cpi")) c.d_cpi = value_at<double>(s, "d_cpi", "scenario");
  }
  return c;
}

}  // namespace housedyn::cli
