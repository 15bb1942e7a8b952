#include "chessvec/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace chessvec {

namespace {

constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::uint64_t h, const char* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= kPrime;
  }
  return h;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string fnv1a_hex(std::string_view data) { return hex(fnv1a(kOffset, data.data(), data.size())); }

std::string fnv1a_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = kOffset;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a(h, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return hex(h);
}

void RunManifest::checksum_files() {
  for (const auto* group : {&inputs, &outputs})
    for (const auto& [role, path] : *group)
      if (std::filesystem::is_regular_file(path)) checksums[path] = fnv1a_file(path);
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["argv"] = argv;
  j["flags"] = flags;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["checksums"] = checksums;
  j["version"] = version;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::ordered_json& j) {
  RunManifest m;
  m.subcommand = j.at("subcommand").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  if (j.contains("flags")) m.flags = j["flags"];
  if (j.contains("seed") && !j["seed"].is_null()) m.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("inputs")) m.inputs = j["inputs"].get<std::map<std::string, std::string>>();
  if (j.contains("outputs")) m.outputs = j["outputs"].get<std::map<std::string, std::string>>();
  if (j.contains("checksums")) m.checksums = j["checksums"].get<std::map<std::string, std::string>>();
  if (j.contains("version")) m.version = j["version"].get<std::string>();
  return m;
}

std::filesystem::path manifest_path(const std::filesystem::path& artifact) {
  return std::filesystem::path(artifact.string() + ".manifest.json");
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& artifact) {
  const auto path = manifest_path(artifact);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.to_json().dump(2) << "\n";
}

RunManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read manifest " + path.string());
  try {
    return RunManifest::from_json(nlohmann::ordered_json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace chessvec
