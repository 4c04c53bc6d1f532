#include "lovebirds/corpus/vocab.hpp"

#include <algorithm>
#include <map>

namespace lovebirds::corpus {

Vocabulary::Vocabulary() {
  append(std::string(kPadToken), 0);
  append(std::string(kUnkToken), 0);
}

std::int32_t Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(std::int32_t id) const {
  if (id < 0 || id >= size()) throw CorpusError("token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

bool Vocabulary::has_reserved() const {
  return size() >= 2 && tokens_[0] == kPadToken && tokens_[1] == kUnkToken;
}

void Vocabulary::append(const std::string& token, std::uint64_t frequency) {
  if (index_.count(token)) throw CorpusError("duplicate vocabulary token '" + token + "'");
  index_.emplace(token, size());
  tokens_.push_back(token);
  freq_.push_back(frequency);
}

Vocabulary build_vocab(const std::vector<std::vector<std::string>>& documents, int min_count) {
  std::map<std::string, std::uint64_t> counts;
  std::size_t total = 0;
  for (const auto& doc : documents) {
    for (const auto& tok : doc) {
      ++counts[tok];
      ++total;
    }
  }
  if (total == 0) throw CorpusError("build_vocab: empty corpus");

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (const auto& [tok, c] : counts) {
    if (tok == kPadToken || tok == kUnkToken) continue;
    if (c > static_cast<std::uint64_t>(min_count)) kept.emplace_back(tok, c);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary vocab;
  vocab.set_min_count(min_count);
  for (const auto& [tok, c] : kept) vocab.append(tok, c);
  return vocab;
}

}  // namespace lovebirds::corpus
