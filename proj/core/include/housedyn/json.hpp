#pragma once

#include <nlohmann/json.hpp>

#include "housedyn/calibration.hpp"
#include "housedyn/dynamics.hpp"
#include "housedyn/evt.hpp"
#include "housedyn/exploratory.hpp"
#include "housedyn/scenario.hpp"

namespace housedyn {

// Parameter files use the published symbol names: k, C, r, K, c, a, b and
// A, B, Q, g, M, nu for the logistic curve under "G".

void to_json(nlohmann::json& j, const RegressionResult& r);
void to_json(nlohmann::json& j, const ScreenSide& s);
void to_json(nlohmann::json& j, const DriverScreen& s);

void to_json(nlohmann::json& j, const LogisticCurve& c);
void from_json(const nlohmann::json& j, LogisticCurve& c);
void to_json(nlohmann::json& j, const OdeParams& p);
/// Missing keys keep their current value, so a partial object overrides defaults.
void from_json(const nlohmann::json& j, OdeParams& p);

void to_json(nlohmann::json& j, const LogisticFitReport& r);
void to_json(nlohmann::json& j, const OdeFitReport& r);

void to_json(nlohmann::json& j, const GevCoefficients& c);
void from_json(const nlohmann::json& j, GevCoefficients& c);
void to_json(nlohmann::json& j, const GofResult& g);
void to_json(nlohmann::json& j, const GevModel& m);
/// Reads coefficients, and stderrs/nll/diagnostics when present.
void from_json(const nlohmann::json& j, GevModel& m);

void to_json(nlohmann::json& j, const ScenarioResult& r);

}  // namespace housedyn
