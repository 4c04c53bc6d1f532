#include "lovebirds/baselines/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lovebirds/pair_model.hpp"

namespace lovebirds::baselines {

std::map<Ngram, std::int64_t> TfidfFeaturizer::count(const corpus::UserProfile& user) const {
  std::map<Ngram, std::int64_t> out;
  for (const auto* t : valid_tweets(user)) {
    const auto& ids = t->token_ids;
    for (int i = 0; i < t->valid_len; ++i)
      for (int n = 1; n <= max_n_ && i + n <= t->valid_len; ++n) {
        Ngram g(ids.begin() + i, ids.begin() + i + n);
        if (std::find(g.begin(), g.end(), corpus::kPadId) != g.end()) break;
        ++out[g];
      }
  }
  return out;
}

void TfidfFeaturizer::fit(const std::vector<const corpus::UserProfile*>& docs, Index top_k, int max_n) {
  if (docs.empty()) throw corpus::CorpusError("tfidf: no training documents");
  if (max_n < 1) throw std::invalid_argument("tfidf: max_n must be positive");
  max_n_ = max_n;
  std::map<Ngram, std::int64_t> total, df;
  for (const auto* d : docs)
    for (const auto& [g, c] : count(*d)) {
      total[g] += c;
      ++df[g];
    }
  std::vector<std::pair<Ngram, std::int64_t>> ranked(total.begin(), total.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (static_cast<Index>(ranked.size()) > top_k) ranked.resize(static_cast<std::size_t>(top_k));
  const double N = static_cast<double>(docs.size());
  features_.clear();
  idf_.clear();
  index_.clear();
  for (const auto& [g, c] : ranked) {
    index_[g] = static_cast<Index>(features_.size());
    features_.push_back(g);
    idf_.push_back(std::log((1.0 + N) / (1.0 + static_cast<double>(df[g]))) + 1.0);
  }
}

SparseVec TfidfFeaturizer::transform(const corpus::UserProfile& user) const {
  SparseVec out;
  for (const auto& [g, c] : count(user)) {
    auto it = index_.find(g);
    if (it == index_.end()) continue;
    out.emplace_back(it->second, static_cast<double>(c) * idf_[static_cast<std::size_t>(it->second)]);
  }
  std::sort(out.begin(), out.end());
  double sq = 0;
  for (const auto& [i, v] : out) sq += v * v;
  if (sq > 0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& [i, v] : out) v *= inv;
  }
  return out;
}

nlohmann::json TfidfFeaturizer::to_json() const {
  return {{"max_n", max_n_}, {"features", features_}, {"idf", idf_}};
}

TfidfFeaturizer TfidfFeaturizer::from_json(const nlohmann::json& j) {
  TfidfFeaturizer f;
  f.max_n_ = j.at("max_n").get<int>();
  f.features_ = j.at("features").get<std::vector<Ngram>>();
  f.idf_ = j.at("idf").get<std::vector<double>>();
  if (f.features_.size() != f.idf_.size()) throw std::invalid_argument("tfidf: features and idf differ in length");
  for (std::size_t i = 0; i < f.features_.size(); ++i) f.index_[f.features_[i]] = static_cast<Index>(i);
  return f;
}

SparseVec pair_features(const SparseVec& a, const SparseVec& b, Index dim) {
  SparseVec diff, prod;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      diff.emplace_back(a[i].first, std::abs(a[i].second));
      ++i;
    } else if (i == a.size() || b[j].first < a[i].first) {
      diff.emplace_back(b[j].first, std::abs(b[j].second));
      ++j;
    } else {
      diff.emplace_back(a[i].first, std::abs(a[i].second - b[j].second));
      prod.emplace_back(dim + a[i].first, a[i].second * b[j].second);
      ++i;
      ++j;
    }
  }
  diff.insert(diff.end(), prod.begin(), prod.end());
  return diff;
}

}  // namespace lovebirds::baselines
