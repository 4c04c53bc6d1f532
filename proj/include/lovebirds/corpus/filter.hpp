#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "lovebirds/corpus/types.hpp"

namespace lovebirds::corpus {

struct FilterConfig {
  std::set<std::string> heart_emojis;  // UTF-8, one code point each
  std::set<std::string> ban_words;     // lowercase, matched per token
  std::set<std::string> music_words;
  std::uint64_t max_followers = 5000;
  bool require_single_mention = true;

  static FilterConfig defaults();
};

// One emoji per line; '#' starts a comment.
std::set<std::string> load_emoji_list(const std::filesystem::path& path);

enum class RejectReason : std::uint8_t {
  ParseError,  // mention syntax in text disagrees with the mentions field
  NoHeartEmoji,
  BanWord,
  MusicWord,
  NoMention,
  MultiMention,
  FollowerLimit,
};
inline constexpr std::size_t kRejectReasonCount = 7;

std::string_view reason_name(RejectReason r);

struct FilterDecision {
  bool keep = false;
  RejectReason reason = RejectReason::ParseError;
  std::string detail;  // e.g. the offending word or user
};

// Follower counts by user id (lowercase). Users without an entry are not
// rejected for follower count.
using FollowerIndex = std::unordered_map<std::string, std::uint64_t>;

// Rules in order: mention parse, heart emoji present, ban words, music words,
// exactly one mention, both users at or under max_followers. The first failing
// rule is reported.
FilterDecision filter_candidate(const RawTweet& tweet, const FilterConfig& cfg,
                                const FollowerIndex& followers = {});

struct FilterAudit {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::array<std::size_t, kRejectReasonCount> rejected{};

  void record(const FilterDecision& d);
  std::size_t rejected_total() const;
};

struct PairAudit {
  std::size_t self_mentions = 0;
  std::size_t duplicates = 0;      // repeated or reversed copies of an accepted pair
  std::size_t user_conflicts = 0;  // pair dropped because a user was already coupled
};

// Canonicalizes (author, mentioned) lexicographically, collapses duplicates and
// bidirectional repeats, drops self-mentions, and keeps only the first pair in
// sorted order for any user who appears in several couples. Output is sorted.
std::vector<CouplePair> form_pairs(const std::vector<RawTweet>& kept, PairAudit* audit = nullptr);

// Lowercased user id; user ids and @handles share one namespace.
std::string normalize_user(std::string_view id);

// @handles in text, lowercased, without the '@'.
std::vector<std::string> extract_mentions(std::string_view text);

}  // namespace lovebirds::corpus
