#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovebirds/numkit/param_store.hpp"

namespace lovebirds {

// Checkpoint container, little-endian throughout:
//
//   8 bytes   magic "LBCKPT01"
//   u32       header length H, then H bytes of UTF-8 JSON
//             (must hold "precision": 32|64; trainer adds seed, model, hyperparameters)
//   u32       entry count
//   per entry, sorted by name:
//     u32 name length, name bytes
//     u8  trainable flag
//     u32 ndim (always 2), u64 rows, u64 cols
//     rows*cols values, row-major, float32 or float64 per "precision"
struct RawTensor {
  std::string name;
  Index rows = 0;
  Index cols = 0;
  bool trainable = true;
  std::vector<double> data;
};

struct Checkpoint {
  nlohmann::json header;
  std::vector<RawTensor> tensors;

  int precision() const { return header.value("precision", 64); }
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

template <typename S>
Checkpoint make_checkpoint(const ParamStore<S>& store, nlohmann::json header) {
  header["precision"] = sizeof(S) == 4 ? 32 : 64;
  Checkpoint ckpt{std::move(header), {}};
  for (const auto& [name, e] : store.entries()) {
    RawTensor t{name, e.value.rows(), e.value.cols(), e.trainable, {}};
    t.data.assign(e.value.data(), e.value.data() + e.value.size());
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

// Overwrites the values of an existing store; names and shapes must agree.
template <typename S>
void load_into(const Checkpoint& ckpt, ParamStore<S>& store) {
  if (ckpt.tensors.size() != store.size())
    throw CheckpointError("checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                          " tensors, model expects " + std::to_string(store.size()));
  for (const auto& t : ckpt.tensors) {
    if (!store.contains(t.name)) throw CheckpointError("checkpoint tensor not in model: " + t.name);
    Mat<S>& dst = store.value(t.name);
    if (dst.rows() != t.rows || dst.cols() != t.cols)
      throw CheckpointError("shape mismatch for " + t.name);
    for (Index i = 0; i < dst.size(); ++i) dst.data()[i] = static_cast<S>(t.data[static_cast<std::size_t>(i)]);
  }
}

}  // namespace lovebirds
