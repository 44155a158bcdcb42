#pragma once

#include <string>
#include <vector>

namespace rotor {

/// Names of the configs embedded at build time from presets/*.json.
std::vector<std::string> presetNames();

/// JSON text of an embedded preset; throws std::out_of_range for unknown
/// names.
const std::string& presetText(const std::string& name);

} // namespace rotor
