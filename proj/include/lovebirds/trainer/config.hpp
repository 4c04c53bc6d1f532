#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovebirds/corpus/pipeline.hpp"
#include "lovebirds/pair_model.hpp"

namespace lovebirds::trainer {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flat "key = value" text; '#' starts a comment; blank lines ignored.
// Later duplicates override earlier ones.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);
// "key=value" as given to --override.
std::pair<std::string, std::string> parse_override(const std::string& arg);

struct TrainConfig {
  std::string model = "couplenet";
  int epochs = 10;
  int batch_size = 16;
  double margin = 0.2;
  double lr = 1e-3;
  int K = 20;
  int L = 10;
  double init_std = 0.1;
  double l2 = 1e-8;
  std::uint64_t seed = 7;
  double clip_norm = 5.0;  // <= 0 disables clipping
  Index embed_dim = 100;
  Index hidden = 100;
  double tweet_dropout = 0.5;
  double user_dropout = 0.2;  // 0.8 read as a keep probability
  Index tfidf_top_k = 5000;
  int ngram_max = 3;
  int precision = 32;  // 32 or 64
  int dev_negatives = 100;
  bool both_directions = true;  // train and evaluate each pair from both sides

  // Returns false for an unknown key; throws ConfigError for a bad value.
  bool set(const std::string& key, const std::string& value);
  // Warnings for values outside the usual grids.
  std::vector<std::string> validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  ModelConfig model_config(Index vocab_size) const;
};

// Applies every key of kv, throwing ConfigError on unknown keys.
void apply(TrainConfig& cfg, const std::map<std::string, std::string>& kv);

// Corpus construction keys: max_followers, min_count, K, L, seed,
// train_ratio, dev_ratio, test_ratio, heart_emojis, ban_words, music_words,
// affection_words (comma-separated lists).
bool set_build_key(corpus::BuildConfig& cfg, const std::string& key, const std::string& value);
void apply(corpus::BuildConfig& cfg, const std::map<std::string, std::string>& kv);

// LOVEBIRDS_SEED, when set and parseable.
std::optional<std::uint64_t> seed_from_env();

}  // namespace lovebirds::trainer
