#pragma once

#include "rodo/odometry.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rodo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every tunable of the odometry pipeline; each key has a default.
struct RunConfig {
  OdometryConfig odometry;
};

/// All recognized `section.key` names, in dump order.
std::vector<std::string> config_keys();

/// Sets one key from its textual value. Throws ConfigError on unknown keys or bad values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& cfg, std::string_view key);

/// Applies `section.key = value` lines; `#` starts a comment.
void apply_config_text(RunConfig& cfg, std::string_view text);
RunConfig load_config_file(const std::filesystem::path& path);

/// Applies one `section.key=value` override.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Throws ConfigError if any value is outside its valid range.
void validate_config(const RunConfig& cfg);

/// Config text listing every key with its current value; parses back to the same config.
std::string dump_config(const RunConfig& cfg);

}  // namespace rodo
