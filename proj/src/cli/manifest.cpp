#include "lovebirds/cli/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace lovebirds::cli {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {
std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}
}  // namespace

std::string file_digest(const fs::path& path) { return hex64(fnv1a64(slurp(path))); }

std::string tree_digest(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::uint64_t h = fnv1a64("");
  for (const auto& f : files) {
    h = fnv1a64(fs::relative(f, dir).generic_string(), h);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(slurp(f), h);
  }
  return hex64(h);
}

void RunManifest::add_input(const fs::path& p) {
  inputs.push_back({p.string(), fs::is_directory(p) ? tree_digest(p) : file_digest(p)});
}

void RunManifest::add_output(const fs::path& p) {
  outputs.push_back({p.string(), fs::is_directory(p) ? tree_digest(p) : file_digest(p)});
}

nlohmann::json RunManifest::to_json() const {
  auto files = [](const std::vector<FileRecord>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& f : v) a.push_back({{"path", f.path}, {"fnv1a64", f.digest}});
    return a;
  };
  return {{"command", command}, {"config", config},   {"inputs", files(inputs)},
          {"outputs", files(outputs)}, {"seed", seed}, {"version", version},
          {"wall_clock_seconds", wall_clock_seconds}};
}

void RunManifest::write(const fs::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace lovebirds::cli
