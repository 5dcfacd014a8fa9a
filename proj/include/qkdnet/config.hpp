#pragma once

#include "qkdnet/sim.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qkdnet {

/// A run or sweep description: the base configuration plus the sweep axes.
struct ExperimentConfig {
    SimConfig base;
    std::vector<double> decoherence_values;
    std::vector<RoutingPolicy> policies;
    std::vector<std::uint64_t> seeds;
};

/// Applies the keys of a flat JSON object onto `cfg`. Keys match SimConfig
/// field names; unknown keys and ill-typed values throw ConfigError naming
/// the key.
void apply_config(const nlohmann::json& doc, ExperimentConfig& cfg);

/// Parses a JSON config document from text / from a file.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// The effective configuration as a JSON object (same keys apply_config reads).
[[nodiscard]] nlohmann::json to_json(const SimConfig& cfg);

}  // namespace qkdnet
