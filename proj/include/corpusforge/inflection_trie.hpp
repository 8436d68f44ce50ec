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

#ifndef CORPUSFORGE_INFLECTION_TRIE_HPP_
#define CORPUSFORGE_INFLECTION_TRIE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge::perturb {

// Code-point trie over a monolingual vocabulary. Two words are inflection
// siblings when they share a prefix of at least
//   max(min_stem_len, ceil(0.6 * min(len(a), len(b))))
// code points and are not the same word.
class InflectionTrie {
 public:
  InflectionTrie() = default;

  static InflectionTrie build(const std::vector<std::pair<std::string, uint64_t>>& vocabulary,
                              std::size_t min_stem_len) {
    if (vocabulary.empty()) throw ConfigError("inflection trie needs a non-empty vocabulary");
    if (min_stem_len < 2) throw ConfigError("min_stem_len must be >= 2");
    InflectionTrie trie;
    trie.min_stem_len_ = min_stem_len;
    trie.nodes_.emplace_back();
    std::map<std::string, uint64_t> merged;
    for (const auto& [w, f] : vocabulary) {
      if (!w.empty()) merged[w] += f;
    }
    for (const auto& [w, f] : merged) trie.insert(w, f);
    return trie;
  }

  std::size_t size() const { return words_.size(); }
  std::size_t min_stem_len() const { return min_stem_len_; }

  bool contains(std::string_view word) const {
    if (nodes_.empty()) return false;
    const auto cps = text::code_points(word);
    const auto node = walk(cps, cps.size());
    return node && nodes_[*node].terminal >= 0;
  }

  // Siblings of `word`, most frequent first, ties in code-point order. Never
  // contains `word` itself.
  std::vector<std::string> query(std::string_view word) const {
    std::vector<std::string> out;
    const auto cps = text::code_points(word);
    if (cps.size() < min_stem_len_ || words_.empty()) return out;
    const auto node = walk(cps, min_stem_len_);
    if (!node) return out;
    std::vector<uint32_t> hits;
    for (uint32_t id : nodes_[*node].below) {
      const auto& cand = words_[id].cps;
      if (cand == cps) continue;
      const std::size_t need = required_prefix(cps.size(), cand.size());
      std::size_t lcp = 0;
      while (lcp < cps.size() && lcp < cand.size() && cps[lcp] == cand[lcp]) ++lcp;
      if (lcp >= need) hits.push_back(id);
    }
    std::sort(hits.begin(), hits.end(), [&](uint32_t a, uint32_t b) {
      if (words_[a].freq != words_[b].freq) return words_[a].freq > words_[b].freq;
      return words_[a].cps < words_[b].cps;
    });
    out.reserve(hits.size());
    for (uint32_t id : hits) out.push_back(words_[id].surface);
    return out;
  }

  std::size_t required_prefix(std::size_t len_a, std::size_t len_b) const {
    const std::size_t shorter = std::min(len_a, len_b);
    const std::size_t sixty = (shorter * 6 + 9) / 10;  // ceil(0.6 * shorter)
    return std::max(min_stem_len_, sixty);
  }

 private:
  struct Node {
    std::map<char32_t, uint32_t> children;
    std::vector<uint32_t> below;  // word ids in this subtree; kept at depth >= min_stem_len
    int64_t terminal = -1;
  };
  struct Word {
    std::string surface;
    std::vector<char32_t> cps;
    uint64_t freq = 0;
  };

  void insert(const std::string& surface, uint64_t freq) {
    const auto id = static_cast<uint32_t>(words_.size());
    words_.push_back(Word{surface, text::code_points(surface), freq});
    const auto& cps = words_.back().cps;
    uint32_t node = 0;
    for (std::size_t depth = 0; depth < cps.size(); ++depth) {
      auto it = nodes_[node].children.find(cps[depth]);
      if (it == nodes_[node].children.end()) {
        nodes_.emplace_back();
        it = nodes_[node].children.emplace(cps[depth], static_cast<uint32_t>(nodes_.size() - 1)).first;
      }
      node = it->second;
      if (depth + 1 >= min_stem_len_) nodes_[node].below.push_back(id);
    }
    nodes_[node].terminal = id;
  }

  std::optional<uint32_t> walk(const std::vector<char32_t>& cps, std::size_t depth) const {
    uint32_t node = 0;
    for (std::size_t i = 0; i < depth; ++i) {
      const auto it = nodes_[node].children.find(cps[i]);
      if (it == nodes_[node].children.end()) return std::nullopt;
      node = it->second;
    }
    return node;
  }

  std::size_t min_stem_len_ = 2;
  std::vector<Node> nodes_;
  std::vector<Word> words_;
};

}  // namespace corpusforge::perturb

#endif  // CORPUSFORGE_INFLECTION_TRIE_HPP_
