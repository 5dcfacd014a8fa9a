#pragma once

#include <stdexcept>
#include <string>

namespace qkdnet {

/// Invalid configuration. `field()` names the offending setting.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Trusted-node placement that does not fit the lattice.
class PlacementError : public ConfigError {
public:
    explicit PlacementError(const std::string& message) : ConfigError("preset", message) {}
};

}  // namespace qkdnet
