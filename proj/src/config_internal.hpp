#pragma once

#include <json.hpp>

#include "shocklab/system.hpp"

namespace shocklab::detail {

/// Shared by the file loader and the experiment config parser.
SystemSpec make_system_from_json(const nlohmann::json& j);

/// Fetch j[key] or throw ConfigError naming the missing/ill-typed field.
double require_number(const nlohmann::json& j, const std::string& key);
double number_or(const nlohmann::json& j, const std::string& key, double fallback);

} // namespace shocklab::detail
