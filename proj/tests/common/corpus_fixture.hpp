#pragma once

// Runs the 50-tweet corpus fixture through filtering, pair formation and
// masking and lists every disagreement with the hand-written labels.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovebirds/corpus/filter.hpp"
#include "lovebirds/corpus/mask.hpp"
#include "lovebirds/corpus/pipeline.hpp"

namespace lovebirds::test {

struct FixtureReport {
  std::size_t tweets = 0;
  std::size_t pairs = 0;
  std::vector<std::string> mismatches;
};

inline FixtureReport check_corpus_fixture(const std::filesystem::path& dir) {
  using namespace lovebirds::corpus;
  FixtureReport r;
  std::ifstream fx_in(dir / "corpus_fixture.json"), gold_in(dir / "corpus_golden.json");
  if (!fx_in || !gold_in) {
    r.mismatches.push_back("fixture files missing under " + dir.string());
    return r;
  }
  const auto fx = nlohmann::json::parse(fx_in);
  const auto gold = nlohmann::json::parse(gold_in);
  FollowerIndex followers;
  for (const auto& [u, n] : fx.at("followers").items()) followers[u] = n.get<std::uint64_t>();
  const auto cfg = FilterConfig::defaults();

  std::vector<RawTweet> kept;
  std::set<RejectReason> seen;
  for (const auto& j : fx.at("candidates")) {
    ++r.tweets;
    RawTweet t = tweet_from_json(j);
    auto d = filter_candidate(t, cfg, followers);
    const std::string got = d.keep ? "keep" : std::string(reason_name(d.reason));
    const auto want = gold.at("decisions").at(t.tweet_id).get<std::string>();
    if (got != want) r.mismatches.push_back(t.tweet_id + ": " + got + " != " + want);
    if (d.keep) kept.push_back(t);
    else seen.insert(d.reason);
  }
  if (seen.size() != kRejectReasonCount)
    r.mismatches.push_back("only " + std::to_string(seen.size()) + " reject reasons exercised");

  PairAudit audit;
  auto pairs = form_pairs(kept, &audit);
  r.pairs = pairs.size();
  std::vector<std::vector<std::string>> got_pairs;
  for (const auto& p : pairs) got_pairs.push_back({p.user_a, p.user_b});
  if (got_pairs != gold.at("pairs").get<std::vector<std::vector<std::string>>>()) r.mismatches.push_back("pairs differ");
  const auto& ga = gold.at("pair_audit");
  if (audit.self_mentions != ga.at("self_mentions").get<std::size_t>() ||
      audit.duplicates != ga.at("duplicates").get<std::size_t>() ||
      audit.user_conflicts != ga.at("user_conflicts").get<std::size_t>())
    r.mismatches.push_back("pair audit counts differ");

  std::map<std::string, std::vector<RawTweet>> timelines;
  for (const auto& j : fx.at("timelines")) {
    ++r.tweets;
    RawTweet t = tweet_from_json(j);
    timelines[t.author_id].push_back(t);
  }
  const auto lex = default_affection_lexicon(cfg);
  for (const auto& [user, expect] : gold.at("masked").items()) {
    auto m = mask_profile(timelines[user], lex);
    std::vector<std::string> texts;
    for (const auto& t : m.tweets) texts.push_back(t.text);
    if (texts != expect.at("texts").get<std::vector<std::string>>()) r.mismatches.push_back(user + ": masked texts differ");
    if (m.emptied != expect.at("emptied").get<bool>()) r.mismatches.push_back(user + ": emptied flag differs");
  }
  return r;
}

}  // namespace lovebirds::test
