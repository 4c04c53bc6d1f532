#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lovebirds/corpus/types.hpp"

namespace lovebirds::corpus {

class Vocabulary {
 public:
  Vocabulary();  // only the reserved <pad>/<unk> entries

  std::int32_t id(const std::string& token) const;  // kUnkId when absent
  const std::string& token(std::int32_t id) const;
  std::uint64_t frequency(std::int32_t id) const { return freq_.at(static_cast<std::size_t>(id)); }
  std::int32_t size() const { return static_cast<std::int32_t>(tokens_.size()); }
  int min_count() const { return min_count_; }
  bool contains(const std::string& token) const { return index_.count(token) != 0; }

  // Reserved ids must sit at 0 and 1.
  bool has_reserved() const;

  void append(const std::string& token, std::uint64_t frequency);
  void set_min_count(int m) { min_count_ = m; }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> freq_;
  std::unordered_map<std::string, std::int32_t> index_;
  int min_count_ = 5;
};

// Tokens with frequency strictly greater than min_count get ids 2.. ordered by
// (frequency desc, token asc). Everything else maps to <unk>.
Vocabulary build_vocab(const std::vector<std::vector<std::string>>& documents, int min_count = 5);

}  // namespace lovebirds::corpus
