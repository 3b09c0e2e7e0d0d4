#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace faota::cli {

/// Hex SHA-1 of "blob <size>\0" + content, the hash `git hash-object` prints.
std::string git_blob_sha1(std::string_view content);

/// ISO-8601 UTC timestamp with second resolution.
std::string utc_now();

/// Output files of one run. Files are written whole, in the order they are added.
class OutputSet {
 public:
  /// Creates `dir` if needed; IoError if it cannot be created.
  explicit OutputSet(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  /// Writes `content` to dir/name and records its hash. IoError on failure.
  void write(const std::string& name, const std::string& content);

  /// [{"path": ..., "bytes": ..., "sha1": ...}] in write order.
  nlohmann::ordered_json entries() const;

 private:
  struct Entry {
    std::string name;
    std::size_t bytes = 0;
    std::string sha1;
  };
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  nlohmann::ordered_json config;
  nlohmann::json seed;  // master seed(s); null when the command draws no randomness
  std::string started;
  std::string finished;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  int exit_status = 0;

  nlohmann::ordered_json to_json(const OutputSet& outputs) const;
};

/// Writes dir/manifest.json. The manifest is not listed among its own outputs.
void write_manifest(const OutputSet& outputs, const RunManifest& manifest);

}  // namespace faota::cli
