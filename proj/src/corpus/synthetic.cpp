#include "lovebirds/corpus/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace lovebirds::corpus {
namespace {

std::string padded(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%04d", prefix, i);
  return buf;
}

std::vector<double> zipf_weights(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) w[static_cast<std::size_t>(r)] = 1.0 / (r + 1.0);
  return w;
}

const std::vector<std::string>& sweet_phrases() {
  static const std::vector<std::string> p = {
      "good night baby love you", "darling i love you so much", "love you so much",
      "miss you already", "my favourite human", "cant wait to see you", "you make me smile",
      "happy anniversary"};
  return p;
}

const std::vector<std::string>& hearts() {
  static const std::vector<std::string> h = {"😘", "💓", "💖", "❤️", "💕", "😍"};
  return h;
}

class TweetIds {
 public:
  std::string next() {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "t%09d", counter_++);
    return buf;
  }

 private:
  int counter_ = 0;
};

}  // namespace

SyntheticCorpus generate_synthetic(const SynthConfig& cfg, Rng& rng) {
  if (cfg.topics < 2) throw CorpusError("generate_synthetic: need at least 2 topics");
  if (cfg.users < 4) throw CorpusError("generate_synthetic: need at least 4 users");
  if (cfg.users % 2 != 0) throw CorpusError("generate_synthetic: user count must be even");
  if (cfg.min_len < 1 || cfg.max_len < cfg.min_len) throw CorpusError("generate_synthetic: bad tweet lengths");
  if (cfg.personal_words < 1 || cfg.hobby_words < cfg.personal_words)
    throw CorpusError("generate_synthetic: need personal_words <= hobby_words");

  SyntheticCorpus out;
  TweetIds ids;

  std::vector<std::vector<std::string>> topic_words(static_cast<std::size_t>(cfg.topics));
  for (int k = 0; k < cfg.topics; ++k)
    for (int w = 0; w < cfg.words_per_topic; ++w) {
      std::string tok = "t" + std::to_string(k) + "w" + std::to_string(w);
      out.token_topic[tok] = k;
      topic_words[static_cast<std::size_t>(k)].push_back(std::move(tok));
    }
  std::vector<std::string> noise;
  for (int w = 0; w < cfg.noise_words; ++w) noise.push_back("n" + std::to_string(w));
  std::vector<std::string> hobby_pool;
  for (int w = 0; w < cfg.hobby_words; ++w) hobby_pool.push_back("h" + std::to_string(w));
  const auto topic_zipf = zipf_weights(cfg.words_per_topic);
  const auto noise_zipf = zipf_weights(cfg.noise_words);
  const auto personal_zipf = zipf_weights(cfg.personal_words);

  std::vector<std::string> users;
  for (int i = 0; i < cfg.users; ++i) users.push_back(padded("user", i));
  const int n_fans = std::max(4, cfg.users / 4);
  std::vector<std::string> fans, idols;
  for (int i = 0; i < n_fans; ++i) fans.push_back(padded("fan", i));
  for (int i = 0; i < 5; ++i) idols.push_back(padded("idol", i));
  for (const auto& u : users) out.followers[u] = 20 + rng.below(2980);
  for (const auto& f : fans) out.followers[f] = 20 + rng.below(2980);
  for (const auto& s : idols) out.followers[s] = 20000 + rng.below(2000000);

  std::vector<int> perm(static_cast<std::size_t>(cfg.users));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);

  struct Couple {
    std::string a, b;
    bool planted;
  };
  std::vector<Couple> couples;
  for (int c = 0; c < cfg.users / 2; ++c) {
    std::string a = users[static_cast<std::size_t>(perm[static_cast<std::size_t>(2 * c)])];
    std::string b = users[static_cast<std::size_t>(perm[static_cast<std::size_t>(2 * c + 1)])];
    if (b < a) std::swap(a, b);
    auto mix_a = rng.dirichlet(cfg.dirichlet_alpha, static_cast<std::size_t>(cfg.topics));
    bool planted = rng.bernoulli(cfg.signal);
    auto mix_b = planted ? mix_a : rng.dirichlet(cfg.dirichlet_alpha, static_cast<std::size_t>(cfg.topics));
    out.mixture[a] = mix_a;
    out.mixture[b] = mix_b;
    couples.push_back({a, b, planted});
  }
  for (const auto& [user, mix] : out.mixture)
    out.dominant_topic[user] = static_cast<int>(std::max_element(mix.begin(), mix.end()) - mix.begin());

  std::sort(couples.begin(), couples.end(), [](const Couple& x, const Couple& y) { return x.a < y.a; });
  for (const auto& c : couples) {
    out.truth.push_back(CouplePair{c.a, c.b, Split::Train});
    out.planted.push_back(c.planted);
  }

  auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
    return v[static_cast<std::size_t>(rng.below(v.size()))];
  };
  auto tweet_len = [&] {
    return cfg.min_len + static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.max_len - cfg.min_len + 1)));
  };
  auto make = [&](const std::string& author, std::string text, std::vector<std::string> mentions) {
    return RawTweet{ids.next(), author, std::move(text), std::move(mentions), out.followers[author]};
  };

  for (const auto& user : users) {
    std::vector<std::string> pool = hobby_pool;
    auto& own = out.hobbies[user];
    for (int k = 0; k < cfg.personal_words; ++k) {
      const auto j = static_cast<std::size_t>(k) + rng.below(pool.size() - static_cast<std::size_t>(k));
      std::swap(pool[static_cast<std::size_t>(k)], pool[j]);
      own.push_back(pool[static_cast<std::size_t>(k)]);
    }
  }

  // Timelines.
  for (const auto& user : users) {
    const auto& mix = out.mixture[user];
    const auto& own = out.hobbies[user];
    for (int i = 0; i < cfg.tweets_per_user; ++i) {
      std::vector<std::string> words;
      const int len = tweet_len();
      if (rng.bernoulli(cfg.chatter_prob)) {
        for (int k = 0; k < len; ++k)
          words.push_back(rng.bernoulli(cfg.noise_token_prob) ? noise[rng.categorical(noise_zipf)]
                                                                : own[rng.categorical(personal_zipf)]);
      } else {
        const auto& vocab = topic_words[rng.categorical(mix)];
        for (int k = 0; k < len; ++k)
          words.push_back(rng.bernoulli(cfg.noise_token_prob) ? noise[rng.categorical(noise_zipf)]
                                                                : vocab[rng.categorical(topic_zipf)]);
      }
      if (rng.bernoulli(cfg.affection_prob)) {
        words.insert(words.begin() + static_cast<long>(rng.below(words.size() + 1)),
                     rng.bernoulli(0.5) ? std::string("love") : pick(hearts()));
      }
      std::vector<std::string> mentions;
      if (rng.bernoulli(cfg.mention_prob)) {
        std::string target = pick(rng.bernoulli(0.5) ? users : fans);
        words.insert(words.begin() + static_cast<long>(rng.below(words.size() + 1)), "@" + target);
        mentions.push_back(target);
      }
      std::string text;
      for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
      out.timelines.push_back(make(user, std::move(text), std::move(mentions)));
    }
  }

  // Heart tweets between partners.
  for (const auto& c : couples) {
    const int n = 1 + static_cast<int>(rng.below(3));
    for (int k = 0; k < n; ++k) {
      bool forward = rng.bernoulli(0.5);
      const std::string& from = forward ? c.a : c.b;
      const std::string& to = forward ? c.b : c.a;
      out.candidates.push_back(make(from, pick(sweet_phrases()) + " " + pick(hearts()) + " @" + to, {to}));
    }
  }

  // Decoys, one rule each.
  const int n_decoys = std::max(1, cfg.users / 8);
  for (int k = 0; k < n_decoys; ++k) {
    const auto i1 = static_cast<std::size_t>(rng.below(fans.size()));
    const auto i2 = (i1 + 1 + static_cast<std::size_t>(rng.below(fans.size() - 1))) % fans.size();
    const std::string& f1 = fans[i1];
    const std::string& f2 = fans[i2];
    const std::string& idol = pick(idols);
    const std::string& user = pick(users);
    out.candidates.push_back(make(f1, "love you bro " + pick(hearts()) + " @" + f2, {f2}));
    out.candidates.push_back(make(f1, "i love this song so much " + pick(hearts()) + " @" + idol, {idol}));
    out.candidates.push_back(make(f1, "night @" + f2 + " @" + user + " " + pick(hearts()), {f2, user}));
    out.candidates.push_back(make(f2, "marry me " + pick(hearts()) + " @" + idol, {idol}));
    out.candidates.push_back(make(f1, "good morning @" + f2, {f2}));
    out.candidates.push_back(make(user, "me myself and i " + pick(hearts()) + " @" + user, {user}));
    out.candidates.push_back(make(f2, "@" + f1 + " " + pick(hearts()) + " see you", {}));
  }
  // Interleave decoys with couple tweets deterministically.
  rng.shuffle(out.candidates);
  return out;
}

SyntheticDataset synthesize_dataset(const SynthConfig& cfg, int K, int L, int min_count, std::uint64_t seed) {
  Rng rng(seed);
  SyntheticDataset out;
  out.raw = generate_synthetic(cfg, rng);
  BuildConfig b;
  b.K = K;
  b.L = L;
  b.min_count = min_count;
  b.seed = seed;
  out.built = build_corpus(out.raw.candidates, out.raw.timelines, out.raw.followers, b);
  return out;
}

}  // namespace lovebirds::corpus
