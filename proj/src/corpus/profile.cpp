#include "lovebirds/corpus/profile.hpp"

#include <cmath>
#include <numeric>

#include "lovebirds/corpus/tokenizer.hpp"

namespace lovebirds::corpus {

TokenizedTweet encode_tweet(const std::vector<std::string>& tokens, const Vocabulary& vocab, int L) {
  TokenizedTweet t;
  t.token_ids.assign(static_cast<std::size_t>(L), kPadId);
  const int n = std::min<int>(L, static_cast<int>(tokens.size()));
  for (int i = 0; i < n; ++i) t.token_ids[static_cast<std::size_t>(i)] = vocab.id(tokens[static_cast<std::size_t>(i)]);
  t.valid_len = n;
  return t;
}

UserProfile encode_profile(const std::string& user_id, const std::vector<RawTweet>& timeline,
                           const Vocabulary& vocab, int K, int L) {
  if (K <= 0 || L <= 0) throw CorpusError("encode_profile: K and L must be positive");
  if (!vocab.has_reserved()) throw CorpusError("encode_profile: vocabulary lacks reserved <pad>/<unk> ids");
  UserProfile p;
  p.user_id = user_id;
  for (const auto& tweet : timeline) {
    if (p.tweet_valid_count == K) break;
    auto tokens = tokenize(tweet.text);
    if (tokens.empty()) continue;
    p.tweets.push_back(encode_tweet(tokens, vocab, L));
    ++p.tweet_valid_count;
  }
  while (p.K() < K) {
    TokenizedTweet empty;
    empty.token_ids.assign(static_cast<std::size_t>(L), kPadId);
    p.tweets.push_back(std::move(empty));
  }
  return p;
}

std::vector<CouplePair> split_pairs(std::vector<CouplePair> pairs, double train_ratio,
                                    double dev_ratio, double test_ratio, Rng& rng) {
  if (train_ratio < 0 || dev_ratio < 0 || test_ratio < 0 ||
      std::abs(train_ratio + dev_ratio + test_ratio - 1.0) > 1e-9)
    throw CorpusError("split_pairs: ratios must be non-negative and sum to 1");
  const std::size_t n = pairs.size();
  if (n < 10) throw CorpusError("split_pairs: need at least 10 pairs, got " + std::to_string(n));
  const auto n_train = static_cast<std::size_t>(std::floor(train_ratio * static_cast<double>(n) + 1e-9));
  const auto n_dev = static_cast<std::size_t>(std::floor(dev_ratio * static_cast<double>(n) + 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (std::size_t k = 0; k < n; ++k) {
    Split s = k < n_train ? Split::Train : (k < n_train + n_dev ? Split::Dev : Split::Test);
    pairs[order[k]].split = s;
  }
  return pairs;
}

}  // namespace lovebirds::corpus
