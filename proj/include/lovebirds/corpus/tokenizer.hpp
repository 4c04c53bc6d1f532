#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lovebirds::corpus {

// Rule-based tweet tokenizer. Rules, applied left to right at each position:
//
//   1. whitespace separates tokens and is dropped
//   2. URLs (http://, https://, www.) run to the next whitespace
//   3. @handle and #tag ([A-Za-z0-9_]+ after the sigil) are single tokens
//   4. every emoji code point is its own token; U+FE0F, U+200D and the
//      skin-tone modifiers U+1F3FB..U+1F3FF are dropped
//   5. words are runs of letters/digits/underscore (any non-ASCII letter
//      counts), with single inner apostrophes kept ("don't")
//   6. any other run of non-space symbols is one punctuation token ("!!", ":)")
//
// ASCII letters are lowercased; other scripts pass through unchanged.
std::vector<std::string> tokenize(std::string_view text);

bool is_emoji(char32_t cp);

// UTF-8 helpers shared by the corpus code. Invalid bytes decode to U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(char32_t cp);

}  // namespace lovebirds::corpus
