// Run configuration: a single JSON document validated against the shipped
// schema, hashed for reproducible artifacts.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "upress/oracle.hpp"
#include "upress/potential.hpp"
#include "upress/pressure.hpp"
#include "upress/system.hpp"

namespace upress {

/// Configuration problems carry a source-anchored location: either
/// "<file>:<line>" for parse errors or "<file>: <json-pointer>" for
/// validation errors.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeasureConfig {
  long long orbit_length = 100000;
  long long burn_in = 1000;
};

struct DerivativeConfig {
  int base_index = 0;
  int direction_index = 1;
  std::vector<double> t_grid;  // defaulted when absent
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  std::optional<SystemSpec> system;
  std::vector<Potential> potentials;
  SeparationParams estimator;
  MeasureConfig measure;
  DerivativeConfig derivative;
  std::optional<SftSpec> sft;
  OutputConfig output;
  std::string config_hash;

  const SystemSpec& require_system() const {
    if (!system) throw ConfigError("config: missing \"system\" block");
    return *system;
  }
};

RunConfig parse_config_text(const std::string& text, const std::string& source_name);
RunConfig load_config_file(const std::string& path);

std::uint64_t fnv1a64(std::string_view s);
std::string hash_hex(std::uint64_t h);

}  // namespace upress
