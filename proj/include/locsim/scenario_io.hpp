#pragma once

#include <filesystem>
#include <string>

#include "locsim/synth.hpp"

namespace locsim {

bool operator==(const SensingNode& a, const SensingNode& b);
bool operator==(const WaveformSpec& a, const WaveformSpec& b);
bool operator==(const TargetSource& a, const TargetSource& b);
bool operator==(const SearchGrid& a, const SearchGrid& b);
bool operator==(const Scenario& a, const Scenario& b);

/// Parses and validates a scenario. Optional fields get their documented
/// defaults: unit channel variances, tone waveforms on distinct indices,
/// noise power derived from snr_db.
Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical serialization: every field explicit, so serialize -> parse ->
/// serialize is byte-stable.
std::string scenario_to_json_text(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace locsim
