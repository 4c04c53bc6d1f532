#include "lovebirds/corpus/pipeline.hpp"

#include <fstream>
#include <map>
#include <unordered_map>

#include "lovebirds/corpus/mask.hpp"
#include "lovebirds/corpus/profile.hpp"
#include "lovebirds/corpus/tokenizer.hpp"

namespace lovebirds::corpus {

nlohmann::json to_json(const RawTweet& t) {
  return nlohmann::json{{"tweet_id", t.tweet_id},
                        {"author_id", t.author_id},
                        {"text", t.text},
                        {"mentions", t.mentions},
                        {"author_follower_count", t.author_follower_count}};
}

RawTweet tweet_from_json(const nlohmann::json& j) {
  RawTweet t;
  t.tweet_id = j.at("tweet_id").get<std::string>();
  t.author_id = j.at("author_id").get<std::string>();
  t.text = j.at("text").get<std::string>();
  if (j.contains("mentions")) t.mentions = j.at("mentions").get<std::vector<std::string>>();
  t.author_follower_count = j.value("author_follower_count", std::uint64_t{0});
  if (t.text.empty()) throw CorpusError("tweet " + t.tweet_id + " has empty text");
  return t;
}

std::vector<RawTweet> read_tweets_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::vector<RawTweet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(tweet_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_tweets_jsonl(const std::filesystem::path& path, const std::vector<RawTweet>& tweets) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot write " + path.string());
  for (const auto& t : tweets) out << to_json(t).dump() << '\n';
}

FollowerIndex read_followers_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  FollowerIndex idx;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line);
    idx[normalize_user(j.at("user_id").get<std::string>())] = j.at("follower_count").get<std::uint64_t>();
  }
  return idx;
}

void write_followers_jsonl(const std::filesystem::path& path, const FollowerIndex& followers) {
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot write " + path.string());
  std::map<std::string, std::uint64_t> sorted(followers.begin(), followers.end());
  for (const auto& [user, count] : sorted)
    out << nlohmann::json{{"user_id", user}, {"follower_count", count}}.dump() << '\n';
}

ImportResult import_manifest(const std::filesystem::path& manifest, const std::vector<RawTweet>& fetched) {
  std::ifstream in(manifest);
  if (!in) throw CorpusError("cannot open " + manifest.string());
  std::unordered_map<std::string, const RawTweet*> by_id;
  for (const auto& t : fetched) by_id[t.tweet_id] = &t;
  ImportResult out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw CorpusError("manifest line without label: " + line);
    std::string id = line.substr(0, tab), label = line.substr(tab + 1);
    if (!label.empty() && label.back() == '\r') label.pop_back();
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      ++out.missing;
      continue;
    }
    if (label == "couple")
      out.candidates.push_back(*it->second);
    else if (label == "timeline")
      out.timelines.push_back(*it->second);
    else
      throw CorpusError("manifest label must be couple or timeline, got " + label);
  }
  return out;
}

BuildResult build_corpus(const std::vector<RawTweet>& candidates, const std::vector<RawTweet>& timelines,
                         const FollowerIndex& followers, const BuildConfig& cfg) {
  nlohmann::json audit;

  FollowerIndex known = followers;
  for (const auto& t : candidates) {
    auto& c = known[normalize_user(t.author_id)];
    c = std::max(c, t.author_follower_count);
  }

  FilterAudit filter_audit;
  std::vector<RawTweet> kept;
  for (const auto& t : candidates) {
    auto d = filter_candidate(t, cfg.filter, known);
    filter_audit.record(d);
    if (d.keep) kept.push_back(t);
  }
  audit["filter"]["total"] = filter_audit.total;
  audit["filter"]["kept"] = filter_audit.kept;
  for (std::size_t r = 0; r < kRejectReasonCount; ++r)
    audit["filter"]["rejected"][std::string(reason_name(static_cast<RejectReason>(r)))] =
        filter_audit.rejected[r];

  PairAudit pair_audit;
  auto pairs = form_pairs(kept, &pair_audit);
  audit["pairs"] = {{"formed", pairs.size()},
                    {"self_mentions", pair_audit.self_mentions},
                    {"duplicates", pair_audit.duplicates},
                    {"user_conflicts", pair_audit.user_conflicts}};

  std::map<std::string, std::vector<RawTweet>> by_author;
  for (const auto& t : timelines) by_author[normalize_user(t.author_id)].push_back(t);

  const auto lexicon = cfg.affection_lexicon.empty() ? default_affection_lexicon(cfg.filter)
                                                     : cfg.affection_lexicon;
  std::map<std::string, std::vector<RawTweet>> masked;
  std::size_t emptied = 0, removed_tweets = 0;
  for (const auto& p : pairs) {
    for (const auto& user : {p.user_a, p.user_b}) {
      if (masked.count(user)) continue;
      auto it = by_author.find(user);
      std::vector<RawTweet> raw = it == by_author.end() ? std::vector<RawTweet>{} : it->second;
      auto m = mask_profile(raw, lexicon);
      removed_tweets += raw.size() - m.tweets.size();
      if (m.emptied) ++emptied;
      masked[user] = std::move(m.tweets);
    }
  }
  std::vector<CouplePair> usable;
  for (const auto& p : pairs)
    if (!masked[p.user_a].empty() && !masked[p.user_b].empty()) usable.push_back(p);
  audit["masking"] = {{"affectionate_tweets_removed", removed_tweets},
                      {"emptied_users", emptied},
                      {"pairs_dropped", pairs.size() - usable.size()}};

  Rng rng(cfg.seed);
  usable = split_pairs(std::move(usable), cfg.train_ratio, cfg.dev_ratio, cfg.test_ratio, rng);

  std::vector<std::vector<std::string>> train_docs;
  for (const auto& p : usable) {
    if (p.split != Split::Train) continue;
    for (const auto& user : {p.user_a, p.user_b})
      for (const auto& t : masked[user]) train_docs.push_back(tokenize(t.text));
  }

  BuildResult result;
  Dataset& ds = result.dataset;
  ds.vocab = build_vocab(train_docs, cfg.min_count);
  ds.K = cfg.K;
  ds.L = cfg.L;
  ds.pairs = usable;
  for (const auto& p : usable)
    for (const auto& user : {p.user_a, p.user_b})
      ds.users.push_back(encode_profile(user, masked[user], ds.vocab, cfg.K, cfg.L));
  ds.index();

  std::size_t counts[3] = {0, 0, 0};
  for (const auto& p : usable) ++counts[static_cast<int>(p.split)];
  audit["splits"] = {{"train", counts[0]}, {"dev", counts[1]}, {"test", counts[2]}};
  audit["users"] = ds.users.size();
  audit["vocab_size"] = ds.vocab.size();
  result.audit = std::move(audit);
  return result;
}

}  // namespace lovebirds::corpus
