#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "config.hpp"

#ifndef FAOTA_VERSION
#define FAOTA_VERSION "unknown"
#endif

namespace faota::cli {

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < length; ++i) os << std::setw(2) << static_cast<int>(digest[i]);
  return os.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw IoError("cannot create output directory " + dir_.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

void OutputSet::write(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
  entries_.push_back({name, content.size(), git_blob_sha1(content)});
}

nlohmann::ordered_json OutputSet::entries() const {
  auto out = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    out.push_back({{"path", e.name}, {"bytes", e.bytes}, {"sha1", e.sha1}});
  }
  return out;
}

nlohmann::ordered_json RunManifest::to_json(const OutputSet& outputs) const {
  nlohmann::ordered_json j;
  j["tool"] = "faota";
  j["version"] = FAOTA_VERSION;
  j["command"] = command;
  j["arguments"] = arguments;
  j["seed"] = seed;
  j["started"] = started;
  j["finished"] = finished;
  j["exit_status"] = exit_status;
  j["checks"] = checks;
  j["outputs"] = outputs.entries();
  j["config"] = config;
  return j;
}

void write_manifest(const OutputSet& outputs, const RunManifest& manifest) {
  const auto path = outputs.dir() / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest.to_json(outputs).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace faota::cli
