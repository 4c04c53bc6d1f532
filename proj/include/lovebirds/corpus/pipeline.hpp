#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovebirds/corpus/dataset.hpp"
#include "lovebirds/corpus/filter.hpp"
#include "lovebirds/corpus/types.hpp"

namespace lovebirds::corpus {

// JSONL, one RawTweet per line:
// {"tweet_id", "author_id", "text", "mentions": [...], "author_follower_count"}
std::vector<RawTweet> read_tweets_jsonl(const std::filesystem::path& path);
void write_tweets_jsonl(const std::filesystem::path& path, const std::vector<RawTweet>& tweets);
nlohmann::json to_json(const RawTweet& t);
RawTweet tweet_from_json(const nlohmann::json& j);

// JSONL {"user_id", "follower_count"}.
FollowerIndex read_followers_jsonl(const std::filesystem::path& path);
void write_followers_jsonl(const std::filesystem::path& path, const FollowerIndex& followers);

// Rebuilds candidate and timeline files from a released manifest of
// "tweet_id \t couple|timeline" lines plus tweets fetched privately by id.
struct ImportResult {
  std::vector<RawTweet> candidates;
  std::vector<RawTweet> timelines;
  std::size_t missing = 0;
};
ImportResult import_manifest(const std::filesystem::path& manifest, const std::vector<RawTweet>& fetched);

struct BuildConfig {
  FilterConfig filter = FilterConfig::defaults();
  std::set<std::string> affection_lexicon;  // empty: default lexicon
  int K = 200;
  int L = 10;
  int min_count = 5;
  double train_ratio = 0.8;
  double dev_ratio = 0.1;
  double test_ratio = 0.1;
  std::uint64_t seed = 7;
};

struct BuildResult {
  Dataset dataset;
  nlohmann::json audit;
};

// candidates: heart-emoji tweets; timelines: tweets grouped by author, newest
// first within each author. Steps: filter, form pairs, mask timelines, drop
// pairs with an emptied user, split, build the vocabulary on training users
// only, encode every paired user.
BuildResult build_corpus(const std::vector<RawTweet>& candidates, const std::vector<RawTweet>& timelines,
                         const FollowerIndex& followers, const BuildConfig& cfg);

}  // namespace lovebirds::corpus
