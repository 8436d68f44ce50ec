// Copyright 2026 The corpusforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CORPUSFORGE_UNICODE_HPP_
#define CORPUSFORGE_UNICODE_HPP_

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/error.hpp"

namespace corpusforge::text {

// Decodes the code point at `pos` and advances it. Returns nullopt on an
// ill-formed sequence; `pos` still advances past the offending bytes.
inline std::optional<char32_t> next_code_point(std::string_view s,
                                               std::size_t& pos) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  int32_t i = static_cast<int32_t>(pos);
  const auto len = static_cast<int32_t>(s.size());
  UChar32 c;
  U8_NEXT(p, i, len, c);
  pos = static_cast<std::size_t>(i);
  if (c < 0) return std::nullopt;
  return static_cast<char32_t>(c);
}

// Byte offset of the first ill-formed sequence, or nullopt for valid UTF-8.
inline std::optional<std::size_t> find_invalid_utf8(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    if (!next_code_point(s, pos)) return start;
  }
  return std::nullopt;
}

inline std::vector<char32_t> code_points(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    out.push_back(next_code_point(s, pos).value_or(U'�'));
  }
  return out;
}

inline std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

inline void append_utf8(std::string& out, char32_t cp) {
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
}

inline std::string to_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t c : cps) append_utf8(out, c);
  return out;
}

inline bool is_space(char32_t c) {
  if (c < 0x80) return c == ' ' || (c >= '\t' && c <= '\r');
  return u_isUWhiteSpace(static_cast<UChar32>(c));
}

// Unicode general category P*.
inline bool is_punct(char32_t c) {
  if (c < 0x80) {
    return (c >= '!' && c <= '/' && c != '$' && c != '+') ||
           (c >= ':' && c <= '@' && c != '<' && c != '=' && c != '>') ||
           (c >= '[' && c <= '_' && c != '^') || c == '{' || c == '}';
  }
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_P_MASK) != 0;
}

// Letters and combining marks. Indic vowel signs and viramas are marks, and
// they belong to the word they attach to.
inline bool is_letter(char32_t c) {
  if (c < 0x80) return (c | 0x20) >= 'a' && (c | 0x20) <= 'z';
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & (U_GC_L_MASK | U_GC_M_MASK)) != 0;
}

inline bool is_ascii_upper(char32_t c) { return c >= 'A' && c <= 'Z'; }

inline std::string nfc(std::string_view s) {
  bool ascii = true;
  for (unsigned char c : s) {
    if (c >= 0x80) {
      ascii = false;
      break;
    }
  }
  if (ascii) return std::string(s);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  const icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (norm->isNormalized(in, status) && U_SUCCESS(status)) return std::string(s);
  status = U_ZERO_ERROR;
  const icu::UnicodeString out = norm->normalize(in, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || (s[b] >= '\t' && s[b] <= '\r'))) ++b;
  while (e > b && (s[e - 1] == ' ' || (s[e - 1] >= '\t' && s[e - 1] <= '\r'))) --e;
  return s.substr(b, e - b);
}

// Trims and collapses every whitespace run into one ASCII space.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const auto cp = next_code_point(s, pos);
    if (cp && is_space(*cp)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.append(s.substr(start, pos - start));
  }
  return out;
}

// Maximal non-whitespace runs.
inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  std::size_t word_start = std::string_view::npos;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const auto cp = next_code_point(s, pos);
    const bool space = cp && is_space(*cp);
    if (space && word_start != std::string_view::npos) {
      words.push_back(s.substr(word_start, start - word_start));
      word_start = std::string_view::npos;
    } else if (!space && word_start == std::string_view::npos) {
      word_start = start;
    }
  }
  if (word_start != std::string_view::npos) words.push_back(s.substr(word_start));
  return words;
}

struct Token {
  std::string surface;
  std::string prefix;  // whitespace preceding the token in the source text
  std::size_t begin = 0;
  std::size_t end = 0;
  bool punct = false;
};

// Whitespace split with every punctuation code point split off as its own
// token. Shared by perturbation, span marking and the metrics.
inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  std::size_t space_start = 0;
  bool in_word = false;
  while (pos < s.size()) {
    const std::size_t start = pos;
    const auto cp = next_code_point(s, pos);
    const char32_t c = cp.value_or(U'�');
    if (is_space(c)) {
      if (in_word) {
        tokens.back().end = start;
        tokens.back().surface.assign(s.substr(tokens.back().begin, start - tokens.back().begin));
        in_word = false;
        space_start = start;
      }
      continue;
    }
    const bool p = is_punct(c);
    if (in_word && (p || tokens.back().punct)) {
      tokens.back().end = start;
      tokens.back().surface.assign(s.substr(tokens.back().begin, start - tokens.back().begin));
      in_word = false;
      space_start = start;
    }
    if (!in_word) {
      Token t;
      t.prefix.assign(s.substr(space_start, start - space_start));
      t.begin = start;
      t.punct = p;
      tokens.push_back(std::move(t));
      in_word = true;
    }
    if (p) {
      tokens.back().end = pos;
      tokens.back().surface.assign(s.substr(start, pos - start));
      in_word = false;
      space_start = pos;
    }
  }
  if (in_word) {
    tokens.back().end = s.size();
    tokens.back().surface.assign(s.substr(tokens.back().begin));
  }
  return tokens;
}

inline std::vector<std::string> token_strings(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : tokenize(s)) out.push_back(std::move(t.surface));
  return out;
}

inline bool all_punct(std::string_view s) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto cp = next_code_point(s, pos);
    if (!cp || !is_punct(*cp)) return false;
  }
  return true;
}

inline bool has_letter(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto cp = next_code_point(s, pos);
    if (cp && is_letter(*cp)) return true;
  }
  return false;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace corpusforge::text

#endif  // CORPUSFORGE_UNICODE_HPP_
