#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include "lovebirds/corpus/dataset.hpp"
#include "lovebirds/corpus/filter.hpp"
#include "lovebirds/corpus/mask.hpp"
#include "lovebirds/corpus/pipeline.hpp"
#include "lovebirds/corpus/profile.hpp"
#include "lovebirds/corpus/synthetic.hpp"
#include "lovebirds/corpus/tokenizer.hpp"
#include "lovebirds/corpus/vocab.hpp"
#include "common/corpus_fixture.hpp"
#include "unit/toy.hpp"

using namespace lovebirds;
using namespace lovebirds::corpus;
using Tokens = std::vector<std::string>;

namespace {

RawTweet tweet(std::string author, std::string text, std::vector<std::string> mentions, std::uint64_t followers = 300) {
  static int counter = 0;
  return RawTweet{"x" + std::to_string(counter++), std::move(author), std::move(text), std::move(mentions), followers};
}

std::filesystem::path data_dir() { return LOVEBIRDS_TEST_DATA; }

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("lovebirds_corpus_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Tokenizer, RuleExamples) {
  EXPECT_EQ(tokenize("Good night 😘😘"), (Tokens{"good", "night", "😘", "😘"}));
  EXPECT_EQ(tokenize("@User1 hi!!"), (Tokens{"@user1", "hi", "!!"}));
  EXPECT_EQ(tokenize("I don't know"), (Tokens{"i", "don't", "know"}));
  EXPECT_EQ(tokenize("see http://t.co/Ab1 now"), (Tokens{"see", "http://t.co/ab1", "now"}));
  EXPECT_EQ(tokenize("#TBT fun"), (Tokens{"#tbt", "fun"}));
  EXPECT_EQ(tokenize("❤️👍🏽"), (Tokens{"❤", "👍"}));
  EXPECT_EQ(tokenize("   "), Tokens{});
}

TEST(Tokenizer, GoldenCorpus) {
  const auto cases_path = data_dir() / "tokenizer_cases.jsonl";
  const auto golden_path = data_dir() / "tokenizer_golden.jsonl";
  std::ifstream cases(cases_path);
  ASSERT_TRUE(cases) << cases_path;
  std::vector<std::string> inputs;
  for (std::string line; std::getline(cases, line);) inputs.push_back(nlohmann::json::parse(line).get<std::string>());
  ASSERT_EQ(inputs.size(), 100u);

  if (std::getenv("LOVEBIRDS_REGEN_GOLDEN")) {
    std::ofstream out(golden_path);
    for (const auto& s : inputs) out << nlohmann::json(tokenize(s)).dump() << '\n';
    GTEST_SKIP() << "golden file regenerated";
  }
  std::ifstream golden(golden_path);
  ASSERT_TRUE(golden) << golden_path;
  std::size_t i = 0;
  for (std::string line; std::getline(golden, line); ++i) {
    ASSERT_LT(i, inputs.size());
    EXPECT_EQ(tokenize(inputs[i]), nlohmann::json::parse(line).get<Tokens>()) << "case " << i << ": " << inputs[i];
  }
  EXPECT_EQ(i, inputs.size());
}

TEST(Filter, DefaultLists) {
  auto cfg = FilterConfig::defaults();
  for (const char* w : {"bro", "sis", "dad", "mum", "follow"}) EXPECT_TRUE(cfg.ban_words.count(w)) << w;
  for (const char* w : {"perform", "music", "official", "song"}) EXPECT_TRUE(cfg.music_words.count(w)) << w;
  EXPECT_EQ(cfg.max_followers, 5000u);
}

TEST(Filter, Examples) {
  auto cfg = FilterConfig::defaults();
  auto d = filter_candidate(tweet("x", "love you bro 💓 @a", {"a"}), cfg);
  EXPECT_FALSE(d.keep);
  EXPECT_EQ(d.reason, RejectReason::BanWord);
  EXPECT_EQ(d.detail, "bro");

  d = filter_candidate(tweet("x", "night @a @b 💖", {"a", "b"}), cfg);
  EXPECT_EQ(d.reason, RejectReason::MultiMention);

  FollowerIndex f{{"x", 300}, {"a", 300}};
  EXPECT_TRUE(filter_candidate(tweet("x", "love you so much 💓 @a", {"a"}), cfg, f).keep);
}

TEST(Filter, FollowerLimitIsInclusive) {
  auto cfg = FilterConfig::defaults();
  EXPECT_TRUE(filter_candidate(tweet("x", "💓 @a", {"a"}, 5000), cfg).keep);
  EXPECT_EQ(filter_candidate(tweet("x", "💓 @a", {"a"}, 5001), cfg).reason, RejectReason::FollowerLimit);
  FollowerIndex f{{"a", 5001}};
  EXPECT_EQ(filter_candidate(tweet("x", "💓 @a", {"a"}), cfg, f).reason, RejectReason::FollowerLimit);
}

TEST(Filter, MentionFieldMustAgreeWithText) {
  auto cfg = FilterConfig::defaults();
  EXPECT_EQ(filter_candidate(tweet("x", "💓 @a", {}), cfg).reason, RejectReason::ParseError);
  EXPECT_EQ(filter_candidate(tweet("x", "💓 @a", {"a", "b"}), cfg).reason, RejectReason::ParseError);
  EXPECT_TRUE(filter_candidate(tweet("x", "💓 @A", {"a"}), cfg).keep);
}

TEST(Filter, AuditCountsEveryReason) {
  FilterAudit audit;
  audit.record({true, RejectReason::ParseError, {}});
  audit.record({false, RejectReason::BanWord, {}});
  audit.record({false, RejectReason::BanWord, {}});
  EXPECT_EQ(audit.total, 3u);
  EXPECT_EQ(audit.kept, 1u);
  EXPECT_EQ(audit.rejected_total(), 2u);
  EXPECT_EQ(audit.rejected[static_cast<std::size_t>(RejectReason::BanWord)], 2u);
}

TEST(Pairs, CanonicalizesReversedCouple) {
  auto pairs = form_pairs({tweet("clara", "💓 @ben", {"ben"}), tweet("ben", "💓 @clara", {"clara"})});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].user_a, "ben");
  EXPECT_EQ(pairs[0].user_b, "clara");
}

TEST(Pairs, SelfMentionDropped) {
  PairAudit audit;
  EXPECT_TRUE(form_pairs({tweet("a", "💓 @a", {"a"})}, &audit).empty());
  EXPECT_EQ(audit.self_mentions, 1u);
}

TEST(Pairs, DuplicatesCollapse) {
  std::vector<RawTweet> kept;
  const std::vector<std::pair<std::string, std::string>> couples = {{"a", "b"}, {"c", "d"}, {"e", "f"}};
  for (int i = 0; i < 10; ++i) {
    const auto& [x, y] = couples[static_cast<std::size_t>(i % 3)];
    kept.push_back(i % 2 ? tweet(x, "💓 @" + y, {y}) : tweet(y, "💓 @" + x, {x}));
  }
  PairAudit audit;
  auto pairs = form_pairs(kept, &audit);
  EXPECT_EQ(pairs.size(), 3u);
  EXPECT_EQ(audit.duplicates, 7u);
}

TEST(Pairs, FirstPairWinsForARepeatedUser) {
  PairAudit audit;
  auto pairs = form_pairs({tweet("b", "💓 @c", {"c"}), tweet("a", "💓 @b", {"b"})}, &audit);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], (CouplePair{"a", "b", Split::Train}));
  EXPECT_EQ(audit.user_conflicts, 1u);
}

TEST(Mask, RemovesAffectionAndMasksMentions) {
  auto lex = default_affection_lexicon();
  auto m = mask_profile({tweet("u", "miss u", {}), tweet("u", "love you 💓", {})}, lex);
  ASSERT_EQ(m.tweets.size(), 1u);
  EXPECT_EQ(m.tweets[0].text, "miss u");
  EXPECT_FALSE(m.emptied);

  m = mask_profile({tweet("u", "hey @ben see you", {"ben"})}, lex);
  EXPECT_EQ(m.tweets[0].text, "hey @USER see you");
  EXPECT_TRUE(m.tweets[0].mentions.empty());
}

TEST(Mask, AllAffectionateEmptiesProfile) {
  auto m = mask_profile({tweet("u", "love it", {}), tweet("u", "😘", {})}, default_affection_lexicon());
  EXPECT_TRUE(m.tweets.empty());
  EXPECT_TRUE(m.emptied);
}

TEST(Mask, Idempotent) {
  auto lex = default_affection_lexicon();
  std::vector<RawTweet> tl = {tweet("u", "go @team_1 go", {"team_1"}), tweet("u", "plain", {}), tweet("u", "xoxo", {})};
  auto once = mask_profile(tl, lex);
  auto twice = mask_profile(once.tweets, lex);
  EXPECT_EQ(once.tweets, twice.tweets);
}

// The 50-tweet fixture: every filter rule, pair formation and masking,
// checked against hand-written labels.
TEST(CorpusFixture, MatchesHandLabels) {
  const auto r = test::check_corpus_fixture(data_dir());
  EXPECT_EQ(r.tweets, 50u);
  EXPECT_GT(r.pairs, 0u);
  for (const auto& m : r.mismatches) ADD_FAILURE() << m;
}

TEST(Vocab, ThresholdIsStrict) {
  std::vector<std::vector<std::string>> docs;
  for (int i = 0; i < 6; ++i) docs.push_back({"six"});
  for (int i = 0; i < 5; ++i) docs.push_back({"five"});
  auto v = build_vocab(docs, 5);
  EXPECT_TRUE(v.contains("six"));
  EXPECT_FALSE(v.contains("five"));
  EXPECT_EQ(v.id("five"), kUnkId);
  EXPECT_EQ(v.token(kPadId), kPadToken);
  EXPECT_EQ(v.token(kUnkId), kUnkToken);
}

TEST(Vocab, TiesBreakAlphabetically) {
  std::vector<std::vector<std::string>> docs(7, {"zeta", "alpha", "mid"});
  docs.push_back({"mid"});
  auto v = build_vocab(docs, 5);
  EXPECT_EQ(v.id("mid"), 2);
  EXPECT_EQ(v.id("alpha"), 3);
  EXPECT_EQ(v.id("zeta"), 4);
}

TEST(Vocab, RoundTripsThroughFile) {
  auto dir = scratch("vocab");
  std::vector<std::vector<std::string>> docs(9, {"a", "b", "😘"});
  auto v = build_vocab(docs, 5);
  write_vocab(dir / "vocab.tsv", v);
  auto back = read_vocab(dir / "vocab.tsv");
  ASSERT_EQ(back.size(), v.size());
  for (std::int32_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(back.token(i), v.token(i));
    EXPECT_EQ(back.frequency(i), v.frequency(i));
  }
}

TEST(Profile, KeepsNewestK) {
  Vocabulary v = test::toy_vocab(10);
  std::vector<RawTweet> tl;
  for (int i = 0; i < 250; ++i) tl.push_back(tweet("u", "w" + std::to_string(2 + i % 8), {}));
  auto p = encode_profile("u", tl, v, 200, 10);
  EXPECT_EQ(p.K(), 200);
  EXPECT_EQ(p.tweet_valid_count, 200);
  EXPECT_EQ(p.tweets[0].token_ids[0], v.id("w2"));
  EXPECT_EQ(p.tweets[199].token_ids[0], v.id("w" + std::to_string(2 + 199 % 8)));
}

TEST(Profile, TruncatesAndPads) {
  Vocabulary v = test::toy_vocab(10);
  auto p = encode_profile("u", {tweet("u", "w2 w3 w4 w5 w6 w7 w8 w9 w2 w3 w4 w5", {})}, v, 1, 10);
  EXPECT_EQ(p.tweets[0].valid_len, 10);
  EXPECT_EQ(p.tweets[0].token_ids[9], v.id("w3"));

  p = encode_profile("u", {tweet("u", "w2", {}), tweet("u", "w3 w4", {}), tweet("u", "...", {})}, v, 10, 4);
  EXPECT_EQ(p.tweet_valid_count, 3);
  EXPECT_EQ(p.K(), 10);
  for (int k = 3; k < 10; ++k)
    for (auto id : p.tweets[static_cast<std::size_t>(k)].token_ids) EXPECT_EQ(id, kPadId);
  EXPECT_EQ(p.tweets[0].token_ids, (std::vector<std::int32_t>{v.id("w2"), 0, 0, 0}));
}

TEST(Split, PaperSizes) {
  std::vector<CouplePair> pairs(4645, CouplePair{"a", "b", Split::Train});
  Rng rng(7);
  auto out = split_pairs(pairs, 0.8, 0.1, 0.1, rng);
  std::map<Split, int> n;
  for (const auto& p : out) ++n[p.split];
  EXPECT_EQ(n[Split::Train], 3716);
  EXPECT_EQ(n[Split::Dev], 464);
  EXPECT_EQ(n[Split::Test], 465);
}

TEST(Split, ExactDivisionAndDeterminism) {
  std::vector<CouplePair> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back({"a" + std::to_string(i), "b" + std::to_string(i), Split::Train});
  Rng r1(3), r2(3);
  auto x = split_pairs(pairs, 0.8, 0.1, 0.1, r1);
  auto y = split_pairs(pairs, 0.8, 0.1, 0.1, r2);
  EXPECT_EQ(x, y);
  std::map<Split, int> n;
  for (const auto& p : x) ++n[p.split];
  EXPECT_EQ(n[Split::Train], 80);
  EXPECT_EQ(n[Split::Dev], 10);
  EXPECT_EQ(n[Split::Test], 10);
}

TEST(Split, RejectsBadInput) {
  std::vector<CouplePair> few(9, CouplePair{"a", "b", Split::Train});
  Rng rng(1);
  EXPECT_THROW(split_pairs(few, 0.8, 0.1, 0.1, rng), CorpusError);
  std::vector<CouplePair> ok(20, CouplePair{"a", "b", Split::Train});
  EXPECT_THROW(split_pairs(ok, 0.8, 0.1, 0.2, rng), CorpusError);
}

TEST(Dataset, SaveLoadRoundTrip) {
  auto ds = test::toy_dataset(10, 4, 5, 30, 3);
  auto dir = scratch("dataset");
  save_dataset(dir, ds);
  auto back = load_dataset(dir);
  EXPECT_EQ(back.K, 4);
  EXPECT_EQ(back.L, 5);
  EXPECT_EQ(back.pairs, ds.pairs);
  ASSERT_EQ(back.users.size(), ds.users.size());
  for (std::size_t i = 0; i < ds.users.size(); ++i) {
    EXPECT_EQ(back.users[i].user_id, ds.users[i].user_id);
    EXPECT_EQ(back.users[i].tweet_valid_count, ds.users[i].tweet_valid_count);
    for (int k = 0; k < 4; ++k) {
      EXPECT_EQ(back.users[i].tweets[static_cast<std::size_t>(k)].token_ids, ds.users[i].tweets[static_cast<std::size_t>(k)].token_ids);
      EXPECT_EQ(back.users[i].tweets[static_cast<std::size_t>(k)].valid_len, ds.users[i].tweets[static_cast<std::size_t>(k)].valid_len);
    }
  }
}

TEST(Dataset, WithKTruncates) {
  auto ds = test::toy_dataset(10, 6, 3, 30, 4);
  auto small = ds.with_K(2);
  EXPECT_EQ(small.K, 2);
  for (std::size_t i = 0; i < ds.users.size(); ++i) {
    EXPECT_EQ(small.users[i].K(), 2);
    EXPECT_EQ(small.users[i].tweet_valid_count, std::min(2, ds.users[i].tweet_valid_count));
    EXPECT_EQ(small.users[i].tweets[0].token_ids, ds.users[i].tweets[0].token_ids);
  }
  EXPECT_THROW(ds.with_K(0), CorpusError);
}

TEST(Manifest, ImportsByLabel) {
  auto dir = scratch("manifest");
  {
    std::ofstream m(dir / "ids.tsv");
    m << "#tweet_id\tlabel\n1\tcouple\n2\ttimeline\n3\ttimeline\n";
  }
  std::vector<RawTweet> fetched = {{"1", "a", "💓 @b", {"b"}, 10}, {"2", "a", "hi", {}, 10}};
  auto r = import_manifest(dir / "ids.tsv", fetched);
  EXPECT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.timelines.size(), 1u);
  EXPECT_EQ(r.missing, 1u);
}

TEST(Jsonl, TweetsRoundTrip) {
  auto dir = scratch("jsonl");
  std::vector<RawTweet> tweets = {{"1", "a", "héllo 😘 @b", {"b"}, 12}, {"2", "b", "x", {}, 0}};
  write_tweets_jsonl(dir / "t.jsonl", tweets);
  EXPECT_EQ(read_tweets_jsonl(dir / "t.jsonl"), tweets);
  std::ofstream(dir / "bad.jsonl") << "{\"tweet_id\": 1}\n";
  EXPECT_THROW(read_tweets_jsonl(dir / "bad.jsonl"), std::exception);
}

TEST(Synthetic, FullSignalSharesTopics) {
  SynthConfig cfg;
  cfg.users = 40;
  cfg.topics = 2;
  cfg.signal = 1.0;
  Rng rng(1);
  auto sc = generate_synthetic(cfg, rng);
  for (std::size_t i = 0; i < sc.truth.size(); ++i) {
    EXPECT_TRUE(sc.planted[i]);
    EXPECT_EQ(sc.dominant_topic[sc.truth[i].user_a], sc.dominant_topic[sc.truth[i].user_b]);
  }
}

TEST(Synthetic, PlantedRateWithinThreeSigma) {
  SynthConfig cfg;
  cfg.users = 200;
  Rng rng(7);
  auto sc = generate_synthetic(cfg, rng);
  const double n = static_cast<double>(sc.planted.size());
  double k = 0;
  for (bool p : sc.planted) k += p;
  EXPECT_NEAR(k / n, 0.9, 3 * std::sqrt(0.9 * 0.1 / n));
}

TEST(Synthetic, DecoysAreRejectedAndCouplesRecovered) {
  SynthConfig cfg;
  cfg.users = 80;
  auto s = synthesize_dataset(cfg, 10, 10, 5, 3);
  const auto& audit = s.built.audit;
  EXPECT_EQ(audit["pairs"]["formed"].get<std::size_t>(), s.raw.truth.size());
  for (const auto& r : {"ban_word", "music_word", "multi_mention", "no_heart_emoji", "parse_error"})
    EXPECT_GT(audit["filter"]["rejected"][r].get<int>(), 0) << r;
  std::set<std::pair<std::string, std::string>> truth, got;
  for (const auto& p : s.raw.truth) truth.insert({p.user_a, p.user_b});
  for (const auto& p : s.built.dataset.pairs) got.insert({p.user_a, p.user_b});
  EXPECT_EQ(got, truth);
}

TEST(Synthetic, SameSeedSameCorpus) {
  SynthConfig cfg;
  cfg.users = 40;
  Rng a(5), b(5);
  auto x = generate_synthetic(cfg, a);
  auto y = generate_synthetic(cfg, b);
  EXPECT_EQ(x.timelines, y.timelines);
  EXPECT_EQ(x.candidates, y.candidates);
}

TEST(Synthetic, RejectsOddUserCount) {
  SynthConfig cfg;
  cfg.users = 41;
  Rng rng(1);
  EXPECT_THROW(generate_synthetic(cfg, rng), CorpusError);
}

TEST(EmojiList, LoadsOnePerLine) {
  auto dir = scratch("emoji");
  std::ofstream(dir / "e.txt") << "# hearts\n💓\n😘  # kiss\n\nnot-an-emoji\n";
  auto s = load_emoji_list(dir / "e.txt");
  EXPECT_EQ(s, (std::set<std::string>{"💓", "😘"}));
}
