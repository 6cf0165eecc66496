#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "benda/experiments.hpp"

namespace benda {

// Line-oriented scenario configs: `[section]` headers, `key = value` pairs,
// `#` starts a comment. Unknown sections or keys are hard errors that name
// the offending line. See the README for the full key table; Ra, Pr, dt,
// nsteps, stride, time_every, epsilon, seed, mechanism, interpolant, the two
// IC kinds, and a preset (or explicit strengths) are mandatory.
ScenarioConfig parse_config_text(const std::string& text, const std::string& source_name);
ScenarioConfig parse_config(const std::string& path);

// Canonical serialization; parse_config_text(write_config_text(c)) round-trips.
std::string write_config_text(const ScenarioConfig& config);

std::string read_text_file(const std::string& path);

// FNV-1a, 64-bit, over raw bytes; the manifest's config hash.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace benda
