#pragma once

#include <string>

#include <json.hpp>

#include "ddro/distribution.hpp"
#include "ddro/patrol.hpp"
#include "ddro/solver.hpp"

namespace ddro {

// Distributions serialize as JSON arrays of reals; balls as
// {"kind", "radius", "reference"}.
nlohmann::json to_json(const DiscreteDistribution& dist);
nlohmann::json to_json(const Ball& ball);
DiscreteDistribution distribution_from_json(const nlohmann::json& j);
Ball ball_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SolveReport& report);

// history.csv: iteration, objective, gradient norm.
std::string history_csv(const SolveReport& report);

// Deterministic float formatting shared by every CSV writer.
std::string format_double(double v);

}  // namespace ddro
