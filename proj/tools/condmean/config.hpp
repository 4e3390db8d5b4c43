#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace condmean::cli {

inline constexpr const char* kCommands[] = {"fiber", "tail", "rcm", "partition",
                                            "wegner", "gauss-check", "bounds-table"};

bool is_command(std::string_view name);

/// Outcome of schema validation. `normalized` has every default filled in;
/// `errors` lists every problem found (validation does not stop early).
struct ConfigResult {
  nlohmann::json normalized;
  std::vector<std::string> errors;

  bool ok() const { return errors.empty(); }
};

/// Validates a parsed config for `command`. Key order in the input does not
/// matter; unknown keys are errors.
ConfigResult validate_config_json(std::string_view command, const nlohmann::json& config);

/// Reads and validates a JSON file. An unreadable or unparsable file yields
/// a single error.
ConfigResult validate_config(std::string_view command, const std::filesystem::path& path);

/// The normalized config with the run seed applied, as hashed and embedded in
/// outputs. Worker counts are excluded since they never change results.
nlohmann::json effective_config(const nlohmann::json& normalized, std::uint64_t seed);

}  // namespace condmean::cli
