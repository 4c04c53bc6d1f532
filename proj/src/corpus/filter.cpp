#include "lovebirds/corpus/filter.hpp"

#include <algorithm>
#include <fstream>

#include "lovebirds/corpus/tokenizer.hpp"

namespace lovebirds::corpus {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "dev") return Split::Dev;
  if (name == "test") return Split::Test;
  throw CorpusError("unknown split '" + std::string(name) + "'");
}

FilterConfig FilterConfig::defaults() {
  FilterConfig cfg;
  // Emoji whose Unicode names mention a heart, plus the face blowing a kiss.
  cfg.heart_emojis = {"😘", "💓", "💖", "❤", "♥", "❣", "💔", "💕", "💗", "💘", "💙",
                      "💚", "💛", "💜", "💝", "💞", "💟", "🖤", "🤍", "🤎", "🧡", "😍",
                      "🥰", "😻", "💑", "💌", "💏"};
  cfg.ban_words = {"bro", "sis", "dad", "mum", "mom", "follow", "brother", "sister",
                   "mother", "father", "mama", "papa"};
  cfg.music_words = {"perform", "music", "official", "song", "album", "concert", "tour"};
  return cfg;
}

std::set<std::string> load_emoji_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open emoji list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (const auto& tok : tokenize(line))
      if (const auto cps = utf8_decode(tok); cps.size() == 1 && is_emoji(cps[0])) out.insert(tok);
  }
  return out;
}

std::string_view reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::ParseError: return "parse_error";
    case RejectReason::NoHeartEmoji: return "no_heart_emoji";
    case RejectReason::BanWord: return "ban_word";
    case RejectReason::MusicWord: return "music_word";
    case RejectReason::NoMention: return "no_mention";
    case RejectReason::MultiMention: return "multi_mention";
    case RejectReason::FollowerLimit: return "follower_limit";
  }
  return "unknown";
}

std::string normalize_user(std::string_view id) {
  std::string out(id);
  if (!out.empty() && out.front() == '@') out.erase(0, 1);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::vector<std::string> extract_mentions(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : tokenize(text))
    if (tok.size() > 1 && tok.front() == '@') out.push_back(tok.substr(1));
  return out;
}

namespace {

bool valid_handle(std::string_view h) {
  if (h.empty()) return false;
  return std::all_of(h.begin(), h.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

FilterDecision reject(RejectReason r, std::string detail = {}) {
  return FilterDecision{false, r, std::move(detail)};
}

}  // namespace

FilterDecision filter_candidate(const RawTweet& tweet, const FilterConfig& cfg,
                                const FollowerIndex& followers) {
  const auto tokens = tokenize(tweet.text);

  std::vector<std::string> in_text;
  for (const auto& tok : tokens)
    if (tok.size() > 1 && tok.front() == '@') in_text.push_back(tok.substr(1));
  std::vector<std::string> declared;
  for (const auto& m : tweet.mentions) {
    std::string h = normalize_user(m);
    if (!valid_handle(h)) return reject(RejectReason::ParseError, "bad handle '" + m + "'");
    declared.push_back(std::move(h));
  }
  {
    auto a = in_text, b = declared;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    if (a != b) return reject(RejectReason::ParseError, "mentions field disagrees with text");
  }

  if (std::none_of(tokens.begin(), tokens.end(),
                   [&](const std::string& t) { return cfg.heart_emojis.count(t) != 0; }))
    return reject(RejectReason::NoHeartEmoji);
  for (const auto& t : tokens)
    if (cfg.ban_words.count(t)) return reject(RejectReason::BanWord, t);
  for (const auto& t : tokens)
    if (cfg.music_words.count(t)) return reject(RejectReason::MusicWord, t);

  std::vector<std::string> distinct = declared;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.empty()) return reject(RejectReason::NoMention);
  if (cfg.require_single_mention && distinct.size() > 1)
    return reject(RejectReason::MultiMention, std::to_string(distinct.size()) + " mentions");

  const std::string author = normalize_user(tweet.author_id);
  std::uint64_t author_followers = tweet.author_follower_count;
  if (auto it = followers.find(author); it != followers.end())
    author_followers = std::max(author_followers, it->second);
  if (author_followers > cfg.max_followers) return reject(RejectReason::FollowerLimit, author);
  for (const auto& user : distinct) {
    if (auto it = followers.find(user); it != followers.end() && it->second > cfg.max_followers)
      return reject(RejectReason::FollowerLimit, user);
  }
  return FilterDecision{true, RejectReason::ParseError, {}};
}

void FilterAudit::record(const FilterDecision& d) {
  ++total;
  if (d.keep)
    ++kept;
  else
    ++rejected[static_cast<std::size_t>(d.reason)];
}

std::size_t FilterAudit::rejected_total() const {
  std::size_t n = 0;
  for (auto c : rejected) n += c;
  return n;
}

std::vector<CouplePair> form_pairs(const std::vector<RawTweet>& kept, PairAudit* audit) {
  PairAudit local;
  PairAudit& a = audit ? *audit : local;

  std::vector<std::pair<std::string, std::string>> canon;
  for (const auto& t : kept) {
    if (t.mentions.empty()) continue;
    std::string author = normalize_user(t.author_id);
    std::string target = normalize_user(t.mentions.front());
    if (author == target) {
      ++a.self_mentions;
      continue;
    }
    if (target < author) std::swap(author, target);
    canon.emplace_back(std::move(author), std::move(target));
  }
  std::sort(canon.begin(), canon.end());
  const auto before = canon.size();
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  a.duplicates += before - canon.size();

  std::set<std::string> coupled;
  std::vector<CouplePair> out;
  for (auto& [ua, ub] : canon) {
    if (coupled.count(ua) || coupled.count(ub)) {
      ++a.user_conflicts;
      continue;
    }
    coupled.insert(ua);
    coupled.insert(ub);
    out.push_back(CouplePair{ua, ub, Split::Train});
  }
  return out;
}

}  // namespace lovebirds::corpus
