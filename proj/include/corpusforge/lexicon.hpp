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

// Per-language word lists consumed by the perturbation engine. On disk:
//
//   <root>/<code_Script>/pronouns.txt       one surface per line
//   <root>/<code_Script>/adpositions.txt
//   <root>/<code_Script>/connectives.txt
//   <root>/<code_Script>/punctuation.txt
//   <root>/<code_Script>/random_tokens.txt
//   <root>/<code_Script>/verb_forms.txt     surface TAB alt1,alt2,...
//   <root>/<code_Script>/vocabulary.txt     word [TAB count], feeds the trie
//
// Missing files leave the list empty. Lines starting with '#' are comments.

#ifndef CORPUSFORGE_LEXICON_HPP_
#define CORPUSFORGE_LEXICON_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge::perturb {

// Keeps first-seen order and drops repeats (after NFC).
class WordList {
 public:
  WordList() = default;
  WordList(std::initializer_list<std::string> words) {
    for (const auto& w : words) add(w);
  }

  void add(std::string_view w) {
    std::string s = text::nfc(text::trim(w));
    if (s.empty()) return;
    if (!exact_.insert(s).second) return;
    lowered_.insert(text::ascii_lower(s));
    words_.push_back(std::move(s));
  }

  bool empty() const { return words_.empty(); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // Case-insensitive for ASCII letters.
  bool contains(std::string_view w) const {
    return exact_.count(std::string(w)) || lowered_.count(text::ascii_lower(w));
  }

  // Entries that differ from `w` ignoring ASCII case.
  std::vector<std::string> alternatives(std::string_view w) const {
    const std::string low = text::ascii_lower(w);
    std::vector<std::string> out;
    for (const auto& x : words_) {
      if (text::ascii_lower(x) != low) out.push_back(x);
    }
    return out;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_set<std::string> exact_;
  std::unordered_set<std::string> lowered_;
};

struct Lexicon {
  WordList pronouns;
  WordList adpositions;
  WordList connectives;
  WordList punctuation;
  WordList random_tokens;
  std::map<std::string, std::vector<std::string>> verb_forms;
  std::vector<std::pair<std::string, uint64_t>> vocabulary;

  void add_verb_forms(std::string_view surface, const std::vector<std::string>& alts) {
    auto& v = verb_forms[text::nfc(text::trim(surface))];
    for (const auto& a : alts) {
      std::string s = text::nfc(text::trim(a));
      if (!s.empty() && std::find(v.begin(), v.end(), s) == v.end()) v.push_back(std::move(s));
    }
  }

  // Alternatives of a verb surface that differ from it, or empty.
  std::vector<std::string> verb_alternatives(std::string_view surface) const {
    auto it = verb_forms.find(std::string(surface));
    if (it == verb_forms.end()) it = verb_forms.find(text::ascii_lower(surface));
    std::vector<std::string> out;
    if (it == verb_forms.end()) return out;
    for (const auto& a : it->second) {
      if (a != surface) out.push_back(a);
    }
    return out;
  }

  // Letters seen in the random-token pool; the spelling perturbation draws
  // inserted and substituted characters from it.
  std::vector<char32_t> alphabet() const {
    std::set<char32_t> seen;
    for (const auto& w : random_tokens.words()) {
      for (char32_t c : text::code_points(w)) {
        if (text::is_letter(c)) seen.insert(c);
      }
    }
    return {seen.begin(), seen.end()};
  }
};

class LexiconSet {
 public:
  void put(const lang::LanguageTag& tag, Lexicon lex) {
    by_lang_[tag.code_script()] = std::move(lex);
  }

  const Lexicon* find(const lang::LanguageTag& tag) const {
    const auto it = by_lang_.find(tag.code_script());
    return it == by_lang_.end() ? nullptr : &it->second;
  }

  static std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path);
    if (!in) return lines;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (text::find_invalid_utf8(line)) {
        throw ParseError("invalid UTF-8 in " + path.string());
      }
      lines.push_back(line);
    }
    return lines;
  }

  static Lexicon load_dir(const std::filesystem::path& dir) {
    Lexicon lex;
    for (const auto& w : read_lines(dir / "pronouns.txt")) lex.pronouns.add(w);
    for (const auto& w : read_lines(dir / "adpositions.txt")) lex.adpositions.add(w);
    for (const auto& w : read_lines(dir / "connectives.txt")) lex.connectives.add(w);
    for (const auto& w : read_lines(dir / "punctuation.txt")) lex.punctuation.add(w);
    for (const auto& w : read_lines(dir / "random_tokens.txt")) lex.random_tokens.add(w);
    for (const auto& line : read_lines(dir / "verb_forms.txt")) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw ParseError("verb_forms line without a tab in " + dir.string() + ": " + line);
      }
      std::vector<std::string> alts;
      std::string_view rest = std::string_view(line).substr(tab + 1);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        alts.emplace_back(rest.substr(0, comma));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      lex.add_verb_forms(std::string_view(line).substr(0, tab), alts);
    }
    for (const auto& line : read_lines(dir / "vocabulary.txt")) {
      const auto tab = line.find('\t');
      uint64_t count = 1;
      if (tab != std::string::npos) count = std::stoull(line.substr(tab + 1));
      lex.vocabulary.emplace_back(text::nfc(text::trim(line.substr(0, tab))), count);
    }
    return lex;
  }

  // Loads <root>/<code_Script> for each tag that has a directory.
  static LexiconSet load(const std::filesystem::path& root,
                         const std::vector<lang::LanguageTag>& tags) {
    LexiconSet set;
    for (const auto& tag : tags) {
      const auto dir = root / tag.code_script();
      if (std::filesystem::is_directory(dir)) set.put(tag, load_dir(dir));
    }
    return set;
  }

 private:
  std::map<std::string, Lexicon> by_lang_;
};

}  // namespace corpusforge::perturb

#endif  // CORPUSFORGE_LEXICON_HPP_
