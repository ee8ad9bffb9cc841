#pragma once

// Run configuration files (JSON). Every object rejects keys it does not know,
// and every error names the offending field.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rested/bandit_core.hpp"
#include "rested/policies.hpp"

namespace rested {

enum class OutputFormat { Csv, Json };

std::string_view to_string(OutputFormat format);
OutputFormat parse_output_format(std::string_view name);

struct OutputSpec {
  std::string path;  // empty: default location
  OutputFormat format = OutputFormat::Csv;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  std::vector<ArmParams> arms;
  PolicyConfig policy;
  std::int64_t horizon = 0;
  std::int64_t replications = 1;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> checkpoints;  // empty: default grid
  bool paired = true;
  OutputSpec output;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws ValidationError on schema violations.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const ArmParams& arm);
nlohmann::json to_json(const PolicyConfig& policy);
nlohmann::json to_json(const RunConfig& config);

/// Compact dump with sorted keys and without the output block; the input of
/// config_hash.
std::string canonical_dump(const RunConfig& config);

/// FNV-1a 64 of canonical_dump, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace rested
