#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovebirds/corpus/dataset.hpp"
#include "lovebirds/pair_model.hpp"

namespace lovebirds::evalkit {

class InsufficientPoolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RankingResult {
  std::string anchor;
  std::string golden;
  int golden_rank = 0;
  double golden_score = 0;
  std::vector<std::string> negatives;
  std::vector<double> negative_scores;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

// 1 + #(negatives scoring above golden) + #(negatives tied with golden).
int golden_rank(double golden_score, const std::vector<double>& negative_scores);

// count distinct ids drawn uniformly from pool minus {anchor, golden}.
std::vector<std::string> sample_negatives(const std::vector<std::string>& pool, const std::string& anchor,
                                          const std::string& golden, int count, Rng& rng);

struct MetricsReport {
  std::map<int, double> hr_at;  // N in {1, 3, 5, 10}
  double accuracy = 0;
  double mrr = 0;
  double mean_rank = 0;
  std::size_t n_test = 0;

  nlohmann::json to_json() const;
};

MetricsReport compute_metrics(const std::vector<int>& ranks);
MetricsReport compute_metrics(const std::vector<RankingResult>& results);

struct EvalConfig {
  int negatives = 100;
  std::uint64_t seed = 7;
  bool both_directions = true;  // rank b for a and a for b
};

// Eval-mode user encodings, computed once per user.
template <typename S>
class EncodingCache {
 public:
  explicit EncodingCache(const PairModel<S>& model) : model_(model) {}
  const UserState<S>& get(const corpus::UserProfile& user);

 private:
  const PairModel<S>& model_;
  std::unordered_map<std::string, UserState<S>> states_;
};

// Scores golden against sampled negatives. Negatives come from every user in
// ds; case c draws them with Rng(Rng::derive(seed, c)).
template <typename S>
RankingResult rank_candidates(const PairModel<S>& model, const corpus::Dataset& ds, const std::string& anchor,
                              const std::string& golden, int negatives, std::uint64_t case_seed,
                              EncodingCache<S>* cache = nullptr);

template <typename S>
std::vector<RankingResult> evaluate(const PairModel<S>& model, const corpus::Dataset& ds, corpus::Split split,
                                    const EvalConfig& cfg);

nlohmann::json metrics_document(const MetricsReport& m, const std::string& model, const std::string& split,
                                int K, const EvalConfig& cfg);

void write_rankings(const std::filesystem::path& path, const std::vector<RankingResult>& results);

// Top-m tweets per user by coupled-attention weight with per-word weights.
// Only CoupleNet exposes the attentions; other models raise CapabilityError.
template <typename S>
nlohmann::json explain(const PairModel<S>& model, const corpus::Dataset& ds, const std::string& user_a,
                       const std::string& user_b, int top_m);

}  // namespace lovebirds::evalkit
