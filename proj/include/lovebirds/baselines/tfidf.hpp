#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovebirds/corpus/types.hpp"
#include "lovebirds/numkit/types.hpp"

namespace lovebirds::baselines {

using Ngram = std::vector<std::int32_t>;
using SparseVec = std::vector<std::pair<Index, double>>;  // sorted by index

// Bag of token-id n-grams (1..max_n, within a tweet) over a user's profile.
// Features are the top_k n-grams by total training frequency; weights are raw
// term count times idf = ln((1 + N) / (1 + df)) + 1, L2-normalized.
class TfidfFeaturizer {
 public:
  void fit(const std::vector<const corpus::UserProfile*>& docs, Index top_k, int max_n);
  SparseVec transform(const corpus::UserProfile& user) const;

  Index size() const { return static_cast<Index>(features_.size()); }
  int max_n() const { return max_n_; }
  const std::vector<Ngram>& features() const { return features_; }
  const std::vector<double>& idf() const { return idf_; }

  nlohmann::json to_json() const;
  static TfidfFeaturizer from_json(const nlohmann::json& j);

 private:
  std::map<Ngram, std::int64_t> count(const corpus::UserProfile& user) const;

  int max_n_ = 3;
  std::vector<Ngram> features_;
  std::vector<double> idf_;
  std::map<Ngram, Index> index_;
};

// [|a - b| , a * b] over 2 * dim features.
SparseVec pair_features(const SparseVec& a, const SparseVec& b, Index dim);

}  // namespace lovebirds::baselines
