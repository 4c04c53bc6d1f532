#pragma once

#include <string>
#include <vector>

#include "lovebirds/corpus/dataset.hpp"
#include "lovebirds/numkit/rng.hpp"

namespace lovebirds::test {

inline corpus::TokenizedTweet toy_tweet(const std::vector<std::int32_t>& ids, int L) {
  corpus::TokenizedTweet t;
  t.token_ids.assign(static_cast<std::size_t>(L), corpus::kPadId);
  for (std::size_t i = 0; i < ids.size() && i < static_cast<std::size_t>(L); ++i) t.token_ids[i] = ids[i];
  t.valid_len = std::min(static_cast<int>(ids.size()), L);
  return t;
}

// K x L profile whose first n_valid tweets hold random ids in [2, vocab).
inline corpus::UserProfile random_profile(const std::string& id, int K, int L, int vocab, int n_valid, Rng& rng) {
  corpus::UserProfile u;
  u.user_id = id;
  for (int k = 0; k < K; ++k) {
    std::vector<std::int32_t> ids;
    if (k < n_valid) {
      const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(L)));
      for (int t = 0; t < len; ++t) ids.push_back(2 + static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(vocab - 2))));
    }
    u.tweets.push_back(toy_tweet(ids, L));
  }
  u.tweet_valid_count = n_valid;
  return u;
}

inline corpus::Vocabulary toy_vocab(int size) {
  corpus::Vocabulary v;
  for (int i = 2; i < size; ++i) v.append("w" + std::to_string(i), 100);
  return v;
}

// n_couples couples of random users; the first 80% train, then 10% dev, rest test.
inline corpus::Dataset toy_dataset(int n_couples, int K, int L, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  corpus::Dataset ds;
  ds.vocab = toy_vocab(vocab);
  ds.K = K;
  ds.L = L;
  const int n_train = n_couples * 8 / 10, n_dev = n_couples / 10;
  for (int c = 0; c < n_couples; ++c) {
    char a[16], b[16];
    std::snprintf(a, sizeof(a), "u%03da", c);
    std::snprintf(b, sizeof(b), "u%03db", c);
    for (const char* id : {a, b})
      ds.users.push_back(random_profile(id, K, L, vocab, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(K))), rng));
    corpus::Split s = c < n_train ? corpus::Split::Train : c < n_train + n_dev ? corpus::Split::Dev : corpus::Split::Test;
    ds.pairs.push_back({a, b, s});
  }
  ds.index();
  return ds;
}

}  // namespace lovebirds::test
