#pragma once

#include "ioda/env/nav_env.hpp"
#include "ioda/env/pour_env.hpp"

#include <filesystem>

namespace ioda::env {

inline constexpr int kEnvConfigVersion = 1;

json env_config_to_json(const NavConfig& cfg);
json env_config_to_json(const PourConfig& cfg);
NavConfig nav_config_from_json(const json& j);
PourConfig pour_config_from_json(const json& j);

/// Builds an environment from a versioned config document
/// `{"schema": "ioda.env-config", "version": 1, "env": "nav"|"pour", ...fields}`.
/// Fields that are absent keep their defaults.
std::unique_ptr<Environment> make_environment(const json& doc);
std::unique_ptr<Environment> load_environment(const std::filesystem::path& path);

std::string to_string(NavRewardVariant v);
NavRewardVariant nav_variant_from_string(const std::string& s);

}  // namespace ioda::env
