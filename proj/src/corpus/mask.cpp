#include "lovebirds/corpus/mask.hpp"

#include <algorithm>

#include "lovebirds/corpus/tokenizer.hpp"

namespace lovebirds::corpus {

std::set<std::string> default_affection_lexicon(const FilterConfig& cfg) {
  std::set<std::string> lex = cfg.heart_emojis;
  for (const char* w : {"love", "loves", "loved", "loving", "lovely", "luv", "ily", "dear",
                        "darling", "babe", "baby", "bae", "sweetheart", "honey", "hubby",
                        "wifey", "boyfriend", "girlfriend", "bf", "gf", "xoxo", "kisses",
                        "anniversary"})
    lex.insert(w);
  return lex;
}

std::string mask_mentions(std::string_view text) {
  // Mirrors the tokenizer's sigil rule: '@' followed by [A-Za-z0-9_]+.
  auto handle_char = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  };
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '@' && i + 1 < text.size() && handle_char(text[i + 1])) {
      std::size_t j = i + 1;
      while (j < text.size() && handle_char(text[j])) ++j;
      out += kMentionMask;
      i = j;
      continue;
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

MaskedTimeline mask_profile(const std::vector<RawTweet>& timeline,
                            const std::set<std::string>& affection_lexicon) {
  MaskedTimeline out;
  for (const auto& tweet : timeline) {
    const auto tokens = tokenize(tweet.text);
    bool affectionate = std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
      return affection_lexicon.count(t) != 0;
    });
    if (affectionate) continue;
    RawTweet clean = tweet;
    clean.text = mask_mentions(tweet.text);
    clean.mentions.clear();
    out.tweets.push_back(std::move(clean));
  }
  out.emptied = out.tweets.empty();
  return out;
}

}  // namespace lovebirds::corpus
