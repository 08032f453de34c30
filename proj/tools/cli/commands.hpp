#pragma once

#include <ostream>

#include "config.hpp"

namespace housedyn::cli {

struct ScenarioFlags {
  bool offset = false;
};

// Each command writes its files under config.out and a short summary to `log`.
// Failures are reported by throwing housedyn::Error.
void cmd_explore(const RunConfig& config, std::ostream& log);
void cmd_simulate(const RunConfig& config, std::ostream& log);
void cmd_fit_logistic(const RunConfig& config, std::ostream& log);
void cmd_fit_ode(const RunConfig& config, std::ostream& log);
void cmd_fit_gev(const RunConfig& config, std::ostream& log);
void cmd_scenario(const RunConfig& config, const ScenarioFlags& flags, std::ostream& log);

}  // namespace housedyn::cli
