#pragma once

// JSON run configuration. Every ExperimentSpec field is addressable by a
// dotted key ("network.K", "codebook.M", ...). Unknown keys are rejected.

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "udn/harness.hpp"

namespace udn {

struct RunConfig {
  ExperimentSpec spec;
  std::optional<SweepGrid> grid;  // present when the file has a "sweep" section
};

/// The configuration every file is merged onto.
nlohmann::json default_config_json();

/// Reads a JSON file. Throws UsageError when it is missing or malformed.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Sets `key` (dotted) to `value`. The value is parsed as JSON when it is
/// valid JSON and taken as a string otherwise; "1,2,3" becomes an array.
/// Throws UsageError for keys outside the schema.
void apply_override(nlohmann::json& config, const std::string& key, const std::string& value);

/// Recursively merges `overlay` onto `base`, rejecting unknown keys.
void merge_config(nlohmann::json& base, const nlohmann::json& overlay);

/// Converts a merged configuration. Throws UsageError on unknown keys or
/// wrong types, naming the offending key.
RunConfig parse_config(const nlohmann::json& config);

}  // namespace udn
