#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lovebirds/corpus/synthetic.hpp"
#include "lovebirds/couplenet/couplenet.hpp"
#include "lovebirds/evalkit/evalkit.hpp"
#include "lovebirds/trainer/trainer.hpp"
#include "unit/toy.hpp"

using namespace lovebirds;
using namespace lovebirds::evalkit;

namespace {

// Scores are a hash of the two ids: unrelated to the data, fixed per pair.
class HashModel final : public PairModel<double> {
 public:
  HashModel() : PairModel<double>(ModelConfig{}) {}
  UserState<double> encode_user(const corpus::UserProfile& u) const override {
    UserState<double> s;
    s.rows = Mat<double>::Constant(1, 1, static_cast<double>(std::hash<std::string>{}(u.user_id) % 1000003));
    return s;
  }
  double score(const UserState<double>& a, const UserState<double>& b) const override {
    const std::uint64_t k = static_cast<std::uint64_t>(a.rows(0, 0)) * 1000003u + static_cast<std::uint64_t>(b.rows(0, 0));
    return Rng(k).uniform();
  }
  double triplet_loss(const corpus::UserProfile&, const corpus::UserProfile&, const corpus::UserProfile&, double,
                      Mode, Rng&, bool, double) override {
    return 0;
  }
};

// Every pair scores the same.
class ConstantModel final : public PairModel<double> {
 public:
  ConstantModel() : PairModel<double>(ModelConfig{}) {}
  UserState<double> encode_user(const corpus::UserProfile&) const override { return {}; }
  double score(const UserState<double>&, const UserState<double>&) const override { return 0.5; }
  double triplet_loss(const corpus::UserProfile&, const corpus::UserProfile&, const corpus::UserProfile&, double,
                      Mode, Rng&, bool, double) override {
    return 0;
  }
};

ModelConfig couplenet_config(int K, int L, Index vocab) {
  ModelConfig c;
  c.vocab_size = vocab;
  c.embed_dim = 8;
  c.hidden = 8;
  c.K = K;
  c.L = L;
  return c;
}

}  // namespace

TEST(GoldenRank, TopScoreRanksFirst) { EXPECT_EQ(golden_rank(0.9, {0.1, 0.5, 0.89}), 1); }

TEST(GoldenRank, TiesArePessimistic) {
  EXPECT_EQ(golden_rank(0.5, std::vector<double>(100, 0.5)), 101);
  EXPECT_EQ(golden_rank(0.5, {0.7, 0.5, 0.2}), 3);
}

TEST(Metrics, TwoPerfectRanks) {
  auto m = compute_metrics(std::vector<int>{1, 1});
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.mrr, 1.0);
  EXPECT_EQ(m.mean_rank, 1.0);
  EXPECT_EQ(m.hr_at.at(3), 1.0);
}

TEST(Metrics, SingleRankFour) {
  auto m = compute_metrics(std::vector<int>{4});
  EXPECT_EQ(m.mrr, 0.25);
  EXPECT_EQ(m.hr_at.at(3), 0.0);
  EXPECT_EQ(m.hr_at.at(5), 1.0);
}

TEST(Metrics, HandArithmetic) {
  auto m = compute_metrics(std::vector<int>{2, 7, 50});
  EXPECT_NEAR(m.hr_at.at(10), 2.0 / 3, 1e-15);
  EXPECT_NEAR(m.mean_rank, 59.0 / 3, 1e-13);
  EXPECT_NEAR(m.mrr, (1.0 / 2 + 1.0 / 7 + 1.0 / 50) / 3, 1e-15);
  EXPECT_EQ(m.accuracy, 0.0);
  EXPECT_EQ(m.n_test, 3u);
}

TEST(Metrics, RejectsEmptyAndZeroRanks) {
  EXPECT_THROW(compute_metrics(std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(compute_metrics(std::vector<int>{0}), std::invalid_argument);
}

TEST(Negatives, DistinctAndExcludeTheCouple) {
  std::vector<std::string> pool;
  for (int i = 0; i < 120; ++i) pool.push_back("u" + std::to_string(i));
  Rng rng(3);
  auto neg = sample_negatives(pool, "u5", "u7", 100, rng);
  std::set<std::string> uniq(neg.begin(), neg.end());
  EXPECT_EQ(uniq.size(), 100u);
  EXPECT_FALSE(uniq.count("u5"));
  EXPECT_FALSE(uniq.count("u7"));
}

TEST(Negatives, SmallPoolIsAnError) {
  std::vector<std::string> pool = {"a", "b", "c"};
  Rng rng(1);
  EXPECT_THROW(sample_negatives(pool, "a", "b", 2, rng), InsufficientPoolError);
  EXPECT_EQ(sample_negatives(pool, "a", "b", 1, rng), std::vector<std::string>{"c"});
}

TEST(Evaluate, RanksMatchBruteForceSort) {
  auto ds = test::toy_dataset(120, 3, 4, 30, 4);
  couplenet::CoupleNet<double> m(couplenet_config(3, 4, 30));
  auto results = evaluate<double>(m, ds, corpus::Split::Test, EvalConfig{});
  ASSERT_EQ(results.size(), 2 * ds.pairs_in(corpus::Split::Test).size());
  for (const auto& r : results) {
    ASSERT_EQ(r.negatives.size(), 100u);
    std::vector<std::pair<double, int>> all = {{r.golden_score, 1}};
    for (double s : r.negative_scores) all.emplace_back(s, 0);
    // descending score; the golden sorts after any negative it ties with
    std::sort(all.begin(), all.end(), [](auto a, auto b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
    const auto pos = std::find_if(all.begin(), all.end(), [](auto p) { return p.second == 1; }) - all.begin();
    EXPECT_EQ(r.golden_rank, pos + 1);
    EXPECT_DOUBLE_EQ(r.golden_score, m.score_pair(ds.user(r.anchor), ds.user(r.golden)));
  }
}

TEST(Evaluate, IsDeterministicAndCoversBothDirections) {
  auto ds = test::toy_dataset(120, 3, 4, 30, 5);
  couplenet::CoupleNet<double> m(couplenet_config(3, 4, 30));
  auto a = evaluate<double>(m, ds, corpus::Split::Test, EvalConfig{});
  auto b = evaluate<double>(m, ds, corpus::Split::Test, EvalConfig{});
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].to_json(), b[i].to_json());
  EXPECT_EQ(a[0].anchor, a[1].golden);
  EXPECT_EQ(a[0].golden, a[1].anchor);
}

TEST(Evaluate, ConstantModelRanksLast) {
  auto ds = test::toy_dataset(120, 2, 3, 10, 6);
  auto m = compute_metrics(evaluate<double>(ConstantModel{}, ds, corpus::Split::Test, EvalConfig{}));
  EXPECT_EQ(m.mean_rank, 101.0);
  EXPECT_EQ(m.hr_at.at(10), 0.0);
}

TEST(Evaluate, RandomModelSitsAtChance) {
  auto ds = test::toy_dataset(1000, 2, 3, 10, 7);
  auto res = evaluate<double>(HashModel{}, ds, corpus::Split::Test, EvalConfig{});
  ASSERT_GE(res.size(), 200u);
  auto m = compute_metrics(res);
  const double n = static_cast<double>(res.size()), p = 10.0 / 101;
  EXPECT_NEAR(m.hr_at.at(10), p, 3 * std::sqrt(p * (1 - p) / n));
  EXPECT_NEAR(m.mean_rank, 51.0, 3 * std::sqrt((101.0 * 101.0 - 1) / 12 / n));
  EXPECT_LE(m.hr_at.at(3), m.hr_at.at(5));
  EXPECT_LE(m.hr_at.at(5), m.hr_at.at(10));
}

TEST(Evaluate, MetricsDocumentRecordsProtocol) {
  EvalConfig cfg;
  cfg.seed = 42;
  auto doc = metrics_document(compute_metrics(std::vector<int>{3}), "hgru", "test", 20, cfg);
  EXPECT_EQ(doc["protocol"]["ties"], "pessimistic");
  EXPECT_EQ(doc["protocol"]["negative_pool"], "all_users");
  EXPECT_EQ(doc["protocol"]["seed"], 42);
  EXPECT_EQ(doc["model"], "hgru");
}

TEST(Explain, SingleTweetProfilesGetFullWeight) {
  auto ds = test::toy_dataset(10, 1, 4, 20, 8);
  couplenet::CoupleNet<double> m(couplenet_config(1, 4, 20));
  auto rep = explain<double>(m, ds, "u000a", "u000b", 3);
  for (const auto& u : rep["users"]) {
    ASSERT_EQ(u["top_tweets"].size(), 1u);
    EXPECT_DOUBLE_EQ(u["top_tweets"][0]["weight"].get<double>(), 1.0);
  }
}

TEST(Explain, WeightsSumToOneAndWordsDecode) {
  auto ds = test::toy_dataset(10, 5, 4, 20, 9);
  couplenet::CoupleNet<double> m(couplenet_config(5, 4, 20));
  auto rep = explain<double>(m, ds, "u001a", "u001b", 100);
  for (const auto& u : rep["users"]) {
    double total = 0, prev = 2;
    for (const auto& t : u["top_tweets"]) {
      const double w = t["weight"];
      EXPECT_LE(w, prev);
      prev = w;
      total += w;
      double words = 0;
      for (const auto& x : t["words"]) {
        EXPECT_EQ(x["token"].get<std::string>()[0], 'w');
        words += x["weight"].get<double>();
      }
      EXPECT_NEAR(words, 1.0, 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(u["top_tweets"].size(), u["valid_tweets"].get<std::size_t>());
  }
}

TEST(Explain, OtherModelsLackAttention) {
  auto ds = test::toy_dataset(10, 2, 4, 20, 10);
  auto cfg = couplenet_config(2, 4, 20);
  cfg.model = "hgru";
  auto m = make_model<double>(cfg);
  EXPECT_THROW(explain<double>(*m, ds, "u000a", "u000b", 1), CapabilityError);
}

// With signal 1.0 both partners draw topical tweets from one shared mixture;
// chatter tweets use personal hobby words and carry nothing about the partner.
TEST(Explain, TopTweetsCarryTheSharedTopics) {
  corpus::SynthConfig sc;
  sc.signal = 1.0;
  auto data = corpus::synthesize_dataset(sc, 20, 10, 5, 7);
  const auto& ds = data.built.dataset;
  trainer::TrainConfig tc;
  tc.epochs = 5;
  auto model = trainer::train_model<float>(ds, tc, nullptr);

  auto topical = [&](const corpus::TokenizedTweet& t) {
    for (int w = 0; w < t.valid_len; ++w)
      if (data.raw.token_topic.count(ds.vocab.token(t.token_ids[static_cast<std::size_t>(w)]))) return true;
    return false;
  };
  int hits = 0, cases = 0, topical_tweets = 0, tweets = 0;
  for (const auto& pr : ds.pairs_in(corpus::Split::Test)) {
    ASSERT_EQ(data.raw.mixture.at(pr.user_a), data.raw.mixture.at(pr.user_b));
    auto rep = explain<float>(*model, ds, pr.user_a, pr.user_b, 1);
    bool both = true;
    for (const auto& u : rep["users"]) {
      const auto& profile = ds.user(u["user_id"].get<std::string>());
      both = both && topical(profile.tweets[u["top_tweets"][0]["slot"].get<std::size_t>()]);
      for (const auto* t : valid_tweets(profile)) {
        topical_tweets += topical(*t);
        ++tweets;
      }
    }
    hits += both;
    ++cases;
  }
  ASSERT_GE(cases, 10);
  const double rate = static_cast<double>(hits) / cases;
  const double base = static_cast<double>(topical_tweets) / tweets;
  EXPECT_GE(rate, 0.8) << hits << "/" << cases;
  // a blind pick of one tweet per side would land on two topical tweets at base^2
  EXPECT_GT(rate, base * base);
}
