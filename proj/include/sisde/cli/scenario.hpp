#pragma once

#include "sisde/cli/config.hpp"
#include "sisde/coefficients.hpp"
#include "sisde/sde_engine.hpp"
#include "sisde/transition_model.hpp"

namespace sisde::cli {

/// Greenhalgh transition table; ConfigError for custom models.
TransitionTable scenario_table(const ScenarioConfig& config);

/// Drift and diffusion of the infected component with the declared constants.
CoefficientPair scenario_coefficients(const ScenarioConfig& config);

TriangularModel scenario_model(const ScenarioConfig& config);

/// (S1, S2) = (y0 - x0, x0); ConfigError unless 0 <= x0 <= y0.
State2 scenario_state(const ScenarioConfig& config);

/// Simulator for sim.scheme. Both schemes report X = infected and Y = total
/// population, so the CSV columns mean the same thing for either.
PathSimulator scenario_simulator(const ScenarioConfig& config);

}  // namespace sisde::cli
