#pragma once

#include <vector>

#include "lovebirds/corpus/types.hpp"
#include "lovebirds/corpus/vocab.hpp"
#include "lovebirds/numkit/rng.hpp"

namespace lovebirds::corpus {

TokenizedTweet encode_tweet(const std::vector<std::string>& tokens, const Vocabulary& vocab, int L);

// Keeps the newest K tweets that yield at least one token (timeline is newest
// first), truncates or pads each to L ids. The result is always K x L.
UserProfile encode_profile(const std::string& user_id, const std::vector<RawTweet>& timeline,
                           const Vocabulary& vocab, int K, int L);

// Pair-level random partition. Train and dev sizes are floor(ratio * n); test
// takes the remainder. Throws when fewer than 10 pairs are given or the ratios
// do not sum to 1. Returns the pairs in input order with split assigned.
std::vector<CouplePair> split_pairs(std::vector<CouplePair> pairs, double train_ratio,
                                    double dev_ratio, double test_ratio, Rng& rng);

}  // namespace lovebirds::corpus
