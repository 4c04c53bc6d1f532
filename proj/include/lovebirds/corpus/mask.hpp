#pragma once

#include <set>
#include <string>
#include <vector>

#include "lovebirds/corpus/filter.hpp"
#include "lovebirds/corpus/types.hpp"

namespace lovebirds::corpus {

// Heart emojis from cfg plus affection words. The word list is an
// approximation of an unpublished lexicon and is deliberately broad.
std::set<std::string> default_affection_lexicon(const FilterConfig& cfg = FilterConfig::defaults());

struct MaskedTimeline {
  std::vector<RawTweet> tweets;
  bool emptied = false;  // every tweet was affectionate (or the input was empty)
};

// Replaces every @handle in text with @USER.
std::string mask_mentions(std::string_view text);

// Drops tweets containing any lexicon token; masks mentions in the rest.
// Order is preserved and the operation is idempotent.
MaskedTimeline mask_profile(const std::vector<RawTweet>& timeline,
                            const std::set<std::string>& affection_lexicon);

}  // namespace lovebirds::corpus
