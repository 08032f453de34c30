#include "housedyn/json.hpp"

namespace housedyn {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

void stats_to_json(json& j, const FitStats& s) {
  j["sse"] = s.sse;
  j["n_iter"] = s.n_iter;
  j["converged"] = s.converged;
  j["best_restart"] = s.best_restart;
  j["residuals"] = s.residuals;
}

}  // namespace

void to_json(json& j, const RegressionResult& r) {
  j = json{{"slope", r.slope},     {"intercept", r.intercept}, {"slope_stderr", r.slope_stderr},
           {"t_stat", r.t_stat},   {"p_value", r.p_value},     {"r_squared", r.r_squared},
           {"n", r.n}};
}

void to_json(json& j, const ScreenSide& s) {
  if (s.result) {
    j = json{{"n", s.result->n}, {"pearson", s.result->correlation}, {"regression", s.result->regression}};
  } else {
    j = json{{"error", s.error}};
  }
}

void to_json(json& j, const DriverScreen& s) {
  j = json{{"driver", s.driver}, {"before_cut", s.before_cut}, {"after_cut", s.after_cut}};
}

void to_json(json& j, const LogisticCurve& c) {
  j = json{{"A", c.upper}, {"B", c.drop}, {"Q", c.offset}, {"g", c.steepness}, {"M", c.midpoint}, {"nu", c.exponent}};
}

void from_json(const json& j, LogisticCurve& c) {
  read_if(j, "A", c.upper);
  read_if(j, "B", c.drop);
  read_if(j, "Q", c.offset);
  read_if(j, "g", c.steepness);
  read_if(j, "M", c.midpoint);
  read_if(j, "nu", c.exponent);
}

void to_json(json& j, const OdeParams& p) {
  j = json::object();
  for (const auto& name : ode_param_names()) j[name] = ode_param(p, name);
  j["G"] = p.curve;
}

void from_json(const json& j, OdeParams& p) {
  for (const auto& name : ode_param_names()) {
    if (j.contains(name)) ode_param(p, name) = j.at(name).get<double>();
  }
  if (j.contains("c_s")) p.consumption = j.at("c_s").get<double>();
  if (j.contains("G")) j.at("G").get_to(p.curve);
}

void to_json(json& j, const LogisticFitReport& r) {
  stats_to_json(j, r);
  j["params"] = r.curve;
}

void to_json(json& j, const OdeFitReport& r) {
  stats_to_json(j, r);
  j["params"] = r.params;
  j["free"] = r.free;
  j["times"] = r.times;
}

void to_json(json& j, const GevCoefficients& c) {
  j = json{{"mu0", c.mu0}, {"mu1", c.mu1}, {"mu2", c.mu2}, {"sigma0", c.sigma0}, {"sigma1", c.sigma1}, {"xi", c.xi}};
}

void from_json(const json& j, GevCoefficients& c) {
  j.at("mu0").get_to(c.mu0);
  j.at("mu1").get_to(c.mu1);
  j.at("mu2").get_to(c.mu2);
  j.at("sigma0").get_to(c.sigma0);
  j.at("sigma1").get_to(c.sigma1);
  j.at("xi").get_to(c.xi);
}

void to_json(json& j, const GofResult& g) {
  j = json{{"ks_stat", g.ks_stat}, {"ks_p", g.ks_p}, {"ad_stat", g.ad_stat}, {"ad_p", g.ad_p}};
}

void to_json(json& j, const GevModel& m) {
  j["coefficients"] = m.coefficients;
  if (m.stderrs) {
    json se = json::object();
    for (std::size_t i = 0; i < 6; ++i) se[gev_coefficient_names()[i]] = (*m.stderrs)[i];
    j["stderrs"] = se;
  } else {
    j["stderrs"] = nullptr;
  }
  j["nll"] = m.nll;
  j["diagnostics"] = m.diagnostics;
  j["n_blocks"] = m.n_blocks;
  json fixed = json::array();
  for (std::size_t i = 0; i < 6; ++i) {
    if (!m.free[i]) fixed.push_back(gev_coefficient_names()[i]);
  }
  j["fixed"] = fixed;
  j["converged"] = m.converged;
  j["rank_deficient"] = m.rank_deficient;
  j["warnings"] = m.warnings;
}

void from_json(const json& j, GevModel& m) {
  j.at("coefficients").get_to(m.coefficients);
  if (j.contains("stderrs") && j.at("stderrs").is_object()) {
    std::array<double, 6> se{};
    for (std::size_t i = 0; i < 6; ++i) se[i] = j.at("stderrs").at(gev_coefficient_names()[i]).get<double>();
    m.stderrs = se;
  }
  read_if(j, "nll", m.nll);
  if (j.contains("diagnostics")) {
    const auto& d = j.at("diagnostics");
    read_if(d, "ks_stat", m.diagnostics.ks_stat);
    read_if(d, "ks_p", m.diagnostics.ks_p);
    read_if(d, "ad_stat", m.diagnostics.ad_stat);
    read_if(d, "ad_p", m.diagnostics.ad_p);
  }
  read_if(j, "n_blocks", m.n_blocks);
}

void to_json(json& j, const ScenarioResult& r) {
  j = json{{"baseline", {{"rate", r.baseline_rate}, {"cpi", r.baseline_cpi}}},
           {"delta", {{"d_rate", r.d_rate}, {"d_cpi", r.d_cpi}}},
           {"d_mu", r.d_mu},
           {"d_sigma", r.d_sigma},
           {"direction", std::string(to_string(r.direction))},
           {"baseline_distribution", {{"mu", r.baseline.mu}, {"sigma", r.baseline.sigma}, {"xi", r.baseline.xi}}},
           {"shifted_distribution", {{"mu", r.shifted.mu}, {"sigma", r.shifted.sigma}, {"xi", r.shifted.xi}}},
           {"density_points", r.density_grid.size()}};
}

}  // namespace housedyn
