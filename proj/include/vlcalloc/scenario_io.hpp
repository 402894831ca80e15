#pragma once

#include <filesystem>
#include <string>

#include "vlcalloc/scene.hpp"

namespace vlcalloc {

/// Scenario documents are JSON objects; the schema is described in
/// docs/formats.md. Parsing errors name the offending line or field.
ScenarioConfig parse_scenario(const std::string& text);
std::string serialize_scenario(const ScenarioConfig& config);

ScenarioConfig load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace vlcalloc
