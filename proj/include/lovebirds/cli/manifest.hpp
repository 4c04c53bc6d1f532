#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lovebirds::cli {

// FNV-1a 64-bit, printed as 16 lowercase hex digits.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
std::string file_digest(const std::filesystem::path& path);
// Digest over every regular file below dir (relative paths and contents, sorted).
std::string tree_digest(const std::filesystem::path& dir);

struct FileRecord {
  std::string path;
  std::string digest;
};

// Written as manifest.json next to the outputs of every command.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  std::uint64_t seed = 0;
  std::string version;
  double wall_clock_seconds = 0;

  void add_input(const std::filesystem::path& p);
  void add_output(const std::filesystem::path& p);
  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace lovebirds::cli
