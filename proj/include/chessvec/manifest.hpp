#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace chessvec {

/// 64-bit FNV-1a, hex-encoded.
std::string fnv1a_hex(std::string_view data);
std::string fnv1a_file(const std::filesystem::path& path);

/// Record of one CLI invocation, written next to each artifact it produced.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;  // without the program name
  nlohmann::ordered_json flags = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> inputs;   // role -> path
  std::map<std::string, std::string> outputs;  // role -> path
  std::map<std::string, std::string> checksums;  // path -> fnv1a
  std::string version;

  /// Fills checksums for every input and output path that exists.
  void checksum_files();
  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::ordered_json& j);
};

std::filesystem::path manifest_path(const std::filesystem::path& artifact);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& artifact);
RunManifest read_manifest(const std::filesystem::path& path);

}  // namespace chessvec
