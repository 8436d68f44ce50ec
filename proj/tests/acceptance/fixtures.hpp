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

// Seeded text and pair generators shared by the acceptance checks.

#ifndef CORPUSFORGE_TESTS_FIXTURES_HPP_
#define CORPUSFORGE_TESTS_FIXTURES_HPP_

#include <string>
#include <vector>

#include "corpusforge/corpus_model.hpp"
#include "corpusforge/inflection_trie.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/lexicon.hpp"
#include "corpusforge/seeding.hpp"

namespace fixtures {

using corpusforge::Rng;
using corpusforge::lang::LanguageTag;

inline const LanguageTag& eng() {
  static const LanguageTag t = corpusforge::lang::parse_tag("WestGermanic+eng_Latn");
  return t;
}

inline const LanguageTag& hin() {
  static const LanguageTag t = corpusforge::lang::parse_tag("CentralIndic+hin_Deva");
  return t;
}

inline std::string lexicon_root() { return std::string(CORPUSFORGE_SOURCE_DIR) + "/data/lexicons"; }

struct Resources {
  corpusforge::perturb::LexiconSet lexicons;
  corpusforge::perturb::InflectionTrie eng_trie;
  corpusforge::perturb::InflectionTrie hin_trie;

  const corpusforge::perturb::InflectionTrie& trie(const LanguageTag& t) const {
    return t == hin() ? hin_trie : eng_trie;
  }
};

inline const Resources& resources() {
  static const Resources r = [] {
    Resources out;
    out.lexicons = corpusforge::perturb::LexiconSet::load(lexicon_root(), {eng(), hin()});
    out.eng_trie = corpusforge::perturb::InflectionTrie::build(out.lexicons.find(eng())->vocabulary, 3);
    out.hin_trie = corpusforge::perturb::InflectionTrie::build(out.lexicons.find(hin())->vocabulary, 3);
    return out;
  }();
  return r;
}

// A text as its token list; punctuation attaches to the previous word.
struct GenText {
  std::vector<std::string> tokens;
  std::vector<bool> punct;
  std::string text;
};

inline const std::vector<std::string>& content_words(const LanguageTag& t) {
  static const std::vector<std::string> en{"river", "stone",  "window", "lamp",  "forest", "bridge",
                                           "cloud", "garden", "letter", "market", "silver", "train",
                                           "cup",   "road",   "paper",  "school", "teacher", "city"};
  static const std::vector<std::string> hi{"पानी",  "किताब", "सड़क", "शहर",  "बच्चा", "खाना",
                                           "स्कूल", "पेड़",   "नदी",  "घर",   "बादल",  "दुकान"};
  return t == hin() ? hi : en;
}

inline const std::vector<std::string>& punct_marks(const LanguageTag& t) {
  static const std::vector<std::string> en{",", ".", "?", ";"};
  static const std::vector<std::string> hi{",", "।", "?"};
  return t == hin() ? hi : en;
}

// Tokens from every lexicon category; no two neighbours are equal.
inline GenText gen_text(Rng& rng, const LanguageTag& tag, std::size_t n_tokens) {
  const auto& lex = *resources().lexicons.find(tag);
  std::vector<std::string> verbs;
  for (const auto& [k, v] : lex.verb_forms) verbs.push_back(k);
  std::vector<std::string> vocab;
  for (const auto& [w, c] : lex.vocabulary) vocab.push_back(w);
  GenText g;
  while (g.tokens.size() < n_tokens) {
    std::string tok;
    bool is_punct = false;
    const auto roll = rng.below(100);
    const bool after_word = !g.tokens.empty() && !g.punct.back();
    if (roll < 10 && after_word) {
      tok = rng.pick(punct_marks(tag));
      is_punct = true;
    } else if (roll < 22) {
      tok = rng.pick(lex.pronouns.words());
    } else if (roll < 32) {
      tok = rng.pick(lex.adpositions.words());
    } else if (roll < 40) {
      tok = rng.pick(lex.connectives.words());
    } else if (roll < 52) {
      tok = rng.pick(verbs);
    } else if (roll < 64) {
      tok = rng.pick(vocab);
    } else {
      tok = rng.pick(content_words(tag));
    }
    if (!g.tokens.empty() && g.tokens.back() == tok) continue;
    if (!is_punct && !g.tokens.empty()) g.text += ' ';
    g.text += tok;
    g.tokens.push_back(tok);
    g.punct.push_back(is_punct);
  }
  return g;
}

inline corpusforge::corpus::SentencePair gen_pair(Rng& rng, const LanguageTag& src,
                                                  const LanguageTag& tgt, std::size_t id,
                                                  std::size_t min_len = 8, std::size_t max_len = 30) {
  corpusforge::corpus::SentencePair p;
  p.id = std::to_string(id);
  p.src_tag = src;
  p.tgt_tag = tgt;
  p.src_text = gen_text(rng, src, static_cast<std::size_t>(rng.between(
                                      static_cast<int64_t>(min_len), static_cast<int64_t>(max_len))))
                   .text;
  p.tgt_text = gen_text(rng, tgt, static_cast<std::size_t>(rng.between(
                                      static_cast<int64_t>(min_len), static_cast<int64_t>(max_len))))
                   .text;
  return p;
}

}  // namespace fixtures

#endif  // CORPUSFORGE_TESTS_FIXTURES_HPP_
