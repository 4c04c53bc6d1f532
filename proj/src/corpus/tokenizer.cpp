#include "lovebirds/corpus/tokenizer.hpp"

namespace lovebirds::corpus {
namespace {

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_ignorable(char32_t c) {
  return c == 0xFE0F || c == 0xFE0E || c == 0x200D || (c >= 0x1F3FB && c <= 0x1F3FF);
}

bool is_ascii_handle(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_nonascii_punct(char32_t c) {
  return (c >= 0xA1 && c <= 0xBF) || c == 0xD7 || c == 0xF7 || (c >= 0x2010 && c <= 0x205E) ||
         (c >= 0x20A0 && c <= 0x20CF) || (c >= 0x3001 && c <= 0x303F) ||
         (c >= 0xFF01 && c <= 0xFF0F) || c == 0xFFFD;
}

bool is_word(char32_t c) {
  if (c < 0x80) return is_ascii_handle(c);
  return !is_space(c) && !is_ignorable(c) && !is_emoji(c) && !is_nonascii_punct(c);
}

bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }

char32_t lower(char32_t c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; }

bool starts_with_ci(const std::u32string& s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k)
    if (lower(s[pos + k]) != static_cast<char32_t>(prefix[k])) return false;
  return true;
}

bool starts_sigil_token(const std::u32string& s, std::size_t i) {
  return (s[i] == '@' || s[i] == '#') && i + 1 < s.size() && is_ascii_handle(s[i + 1]);
}

}  // namespace

bool is_emoji(char32_t c) {
  return (c >= 0x1F000 && c <= 0x1FAFF) || (c >= 0x2600 && c <= 0x27BF) ||
         (c >= 0x2300 && c <= 0x23FF) || (c >= 0x2B00 && c <= 0x2BFF) || c == 0x3030 ||
         c == 0x303D || c == 0x3297 || c == 0x3299;
}

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b < 0x80) {
      cp = b;
    } else if ((b & 0xE0) == 0xC0) {
      cp = b & 0x1F;
      extra = 1;
    } else if ((b & 0xF0) == 0xE0) {
      cp = b & 0x0F;
      extra = 2;
    } else if ((b & 0xF8) == 0xF0) {
      cp = b & 0x07;
      extra = 3;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      auto c = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((c & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  const std::u32string s = utf8_decode(text);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::size_t n = s.size();

  auto emit = [&](std::size_t from, std::size_t to) {
    std::string tok;
    for (std::size_t k = from; k < to; ++k)
      if (!is_ignorable(s[k])) tok += utf8_encode(lower(s[k]));
    if (!tok.empty()) tokens.push_back(std::move(tok));
  };

  while (i < n) {
    char32_t c = s[i];
    if (is_space(c) || is_ignorable(c)) {
      ++i;
      continue;
    }
    if (starts_with_ci(s, i, "http://") || starts_with_ci(s, i, "https://") ||
        starts_with_ci(s, i, "www.")) {
      std::size_t j = i;
      while (j < n && !is_space(s[j])) ++j;
      emit(i, j);
      i = j;
      continue;
    }
    if (starts_sigil_token(s, i)) {
      std::size_t j = i + 1;
      while (j < n && is_ascii_handle(s[j])) ++j;
      emit(i, j);
      i = j;
      continue;
    }
    if (is_emoji(c)) {
      emit(i, i + 1);
      ++i;
      continue;
    }
    if (is_word(c)) {
      std::size_t j = i;
      while (j < n) {
        if (is_word(s[j])) {
          ++j;
        } else if (is_apostrophe(s[j]) && j + 1 < n && is_word(s[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
      emit(i, j);
      i = j;
      continue;
    }
    std::size_t j = i;
    while (j < n && !is_space(s[j]) && !is_word(s[j]) && !is_emoji(s[j]) && !is_ignorable(s[j]) &&
           !(j > i && starts_sigil_token(s, j)))
      ++j;
    emit(i, j);
    i = j;
  }
  return tokens;
}

}  // namespace lovebirds::corpus
