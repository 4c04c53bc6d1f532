#include "lovebirds/numkit/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace lovebirds {
namespace {

constexpr char kMagic[8] = {'L', 'B', 'C', 'K', 'P', 'T', '0', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw CheckpointError("truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string get_string(std::istream& in, std::uint32_t len) {
  std::string s(len, '\0');
  if (len && !in.read(s.data(), len)) throw CheckpointError("truncated checkpoint");
  return s;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const int precision = ckpt.precision();
  if (precision != 32 && precision != 64) throw CheckpointError("precision must be 32 or 64");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  const std::string header = ckpt.header.dump();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::vector<const RawTensor*> sorted;
  for (const auto& t : ckpt.tensors) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });

  put<std::uint32_t>(out, static_cast<std::uint32_t>(sorted.size()));
  for (const RawTensor* t : sorted) {
    if (static_cast<Index>(t->data.size()) != t->rows * t->cols)
      throw CheckpointError("tensor " + t->name + " data does not match its shape");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t->name.size()));
    out.write(t->name.data(), static_cast<std::streamsize>(t->name.size()));
    put<std::uint8_t>(out, t->trainable ? 1 : 0);
    put<std::uint32_t>(out, 2);
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t->rows));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t->cols));
    for (double x : t->data) {
      if (precision == 32)
        put<float>(out, static_cast<float>(x));
      else
        put<double>(out, x);
    }
  }
  if (!out) throw CheckpointError("failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw CheckpointError(path.string() + " is not a checkpoint");
  Checkpoint ckpt;
  auto header_len = get<std::uint32_t>(in);
  ckpt.header = nlohmann::json::parse(get_string(in, header_len));
  const int precision = ckpt.precision();
  if (precision != 32 && precision != 64) throw CheckpointError("unsupported precision");
  auto count = get<std::uint32_t>(in);
  for (std::uint32_t k = 0; k < count; ++k) {
    RawTensor t;
    t.name = get_string(in, get<std::uint32_t>(in));
    t.trainable = get<std::uint8_t>(in) != 0;
    auto ndim = get<std::uint32_t>(in);
    if (ndim != 2) throw CheckpointError("tensor " + t.name + " has unsupported rank");
    t.rows = static_cast<Index>(get<std::uint64_t>(in));
    t.cols = static_cast<Index>(get<std::uint64_t>(in));
    t.data.resize(static_cast<std::size_t>(t.rows * t.cols));
    for (double& x : t.data) x = precision == 32 ? static_cast<double>(get<float>(in)) : get<double>(in);
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

}  // namespace lovebirds
