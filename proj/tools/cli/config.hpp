#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "faota/analytics.hpp"
#include "faota/channel.hpp"
#include "faota/montecarlo.hpp"
#include "faota/ota.hpp"
#include "faota/training.hpp"

namespace faota::cli {

/// Bad configuration or usage. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output. Maps to exit status 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Documented defaults. Every accepted key appears here; a null default marks an
/// optional key with no value.
nlohmann::ordered_json default_config();

/// Layered configuration: defaults, then an optional JSON file, then command-line
/// overrides. The resolved tree is what the manifest records.
class Config {
 public:
  Config();

  /// Merges a JSON config file. Unknown keys and type mismatches raise ConfigError
  /// naming the dotted key. A config file must set system.tau explicitly.
  void merge_file(const std::filesystem::path& path);
  /// Merges a JSON object (same rules as a file, without the tau requirement).
  void merge(const nlohmann::json& overlay, const std::string& origin);
  /// Applies `dotted.key=value`; value is parsed as JSON, falling back to a string.
  void set(const std::string& assignment);
  void set(const std::string& key, const nlohmann::json& value);

  const nlohmann::ordered_json& resolved() const { return tree_; }
  const nlohmann::ordered_json& at(const std::string& dotted) const;

  /// Linear-scale powers after applying the `_dbm` / unsuffixed precedence rule.
  double p_max_watts() const;
  double sigma2_watts() const;

  McPlan mc_plan() const;
  std::vector<DependenceSpec> mc_variants() const;
  /// Training variant names in order ("ideal" or a dependence spec string).
  std::vector<std::string> fl_variants() const;
  FlConfig fl_config() const;
  std::vector<std::uint64_t> fl_seeds() const;
  OtaConfig ota_config() const;

  std::filesystem::path output_dir() const;

 private:
  nlohmann::ordered_json tree_;
};

/// Parses one variant name: "clayton" alone means Clayton(system.beta).
DependenceSpec parse_variant(const std::string& name, double default_beta);

}  // namespace faota::cli
