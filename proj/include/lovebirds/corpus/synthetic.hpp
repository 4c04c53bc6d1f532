#pragma once

#include <map>
#include <string>
#include <vector>

#include "lovebirds/corpus/filter.hpp"
#include "lovebirds/corpus/pipeline.hpp"
#include "lovebirds/corpus/types.hpp"
#include "lovebirds/numkit/rng.hpp"

namespace lovebirds::corpus {

struct SynthConfig {
  int topics = 8;
  int users = 400;            // even; every user is in exactly one couple
  int tweets_per_user = 60;   // timeline length before masking
  double signal = 0.9;        // probability a couple shares its topic mixture
  double dirichlet_alpha = 0.3;
  int words_per_topic = 30;
  int noise_words = 150;
  int min_len = 4;
  int max_len = 14;
  double noise_token_prob = 0.3;  // per token inside a topical tweet
  double chatter_prob = 0.15;     // off-topic tweet about the author's own hobbies
  int hobby_words = 1500;         // pool the personal hobby words are drawn from
  int personal_words = 12;        // hobby words per user, unrelated to the partner
  double affection_prob = 0.05;   // tweet that masking must remove
  double mention_prob = 0.1;      // tweet carrying an @mention to mask
};

struct SyntheticCorpus {
  std::vector<RawTweet> candidates;  // heart-emoji tweets incl. decoys
  std::vector<RawTweet> timelines;   // grouped by author, newest first
  FollowerIndex followers;           // every synthetic account incl. idols
  std::vector<CouplePair> truth;     // canonical, sorted
  std::map<std::string, std::vector<double>> mixture;  // per user topic mixture
  std::map<std::string, int> dominant_topic;
  std::vector<bool> planted;         // per truth pair: shares its mixture
  std::map<std::string, int> token_topic;  // topic words only
  std::map<std::string, std::vector<std::string>> hobbies;
};

// Users draw a Dirichlet topic mixture. With probability `signal` a couple
// shares one mixture (hence its dominant topic); otherwise partners draw
// independently. A topical tweet picks a topic from the author's mixture and
// emits Zipf-distributed topic words mixed with common noise tokens. Chatter
// tweets use the author's personal hobby words, which carry no information
// about the partner. Candidates contain
// one to three heart tweets per couple plus decoys that each filter rule
// must reject.
SyntheticCorpus generate_synthetic(const SynthConfig& cfg, Rng& rng);

struct SyntheticDataset {
  SyntheticCorpus raw;
  BuildResult built;
};

// generate_synthetic with Rng(seed), then build_corpus with the same seed.
SyntheticDataset synthesize_dataset(const SynthConfig& cfg, int K, int L, int min_count, std::uint64_t seed);

}  // namespace lovebirds::corpus
