#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "geoquad/mission.hpp"
#include "geoquad/sim.hpp"

namespace geoquad {

/// Everything one simulation run needs.
struct ScenarioConfig {
  std::string scenario;  // registry name, or the inline mission's name
  Mission mission;
  SimConfig sim;
  std::string output_prefix;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct ScenarioInfo {
  std::string name;
  std::string description;
};

/// Built-in scenarios, in listing order.
const std::vector<ScenarioInfo>& scenario_registry();
bool is_registered(std::string_view name);
/// Throws Error(ValidationError) for unknown names.
Mission registry_mission(std::string_view name);

/// Default config for a registry scenario.
ScenarioConfig default_config(std::string_view name);

/**
 * @brief Parses a JSON scenario config.
 *
 * Top-level keys: "scenario" (registry name) or "mission" (inline), plus the
 * optional override sections "params", "gains", "sim" and "output". Unknown
 * keys are rejected. Throws Error(ParseError) with line and column for
 * malformed text and Error(ValidationError) naming the violated invariant.
 */
ScenarioConfig parse_config(std::string_view text);

/// Reads and parses a config file; Error(IoError) if it cannot be read.
ScenarioConfig load_config(const std::string& path);

/// Serializes with the mission inline, so parse_config(config_to_json(c)) == c
/// up to the scenario name being taken from the mission.
std::string config_to_json(const ScenarioConfig& config);

}  // namespace geoquad
