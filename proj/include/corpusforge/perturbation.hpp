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

// Seeded, budgeted error injection over tokenized text. Every edit is logged
// with its span in the original and in the perturbed token sequence, and the
// log replays to the exact perturbed bytes.
//
// Budget: B = max(1, round_half_up(rate * N)) original token positions. The
// budget is dealt round-robin to the plan's kinds; a kind that runs out of
// eligible positions passes its remainder on to the kinds that still have
// some. Each original position is edited at most once.

#ifndef CORPUSFORGE_PERTURBATION_HPP_
#define CORPUSFORGE_PERTURBATION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/inflection_trie.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/lexicon.hpp"
#include "corpusforge/seeding.hpp"
#include "corpusforge/unicode.hpp"
#include "json.hpp"

namespace corpusforge::perturb {

using Json = nlohmann::ordered_json;

enum class Kind {
  kTokenNoise,
  kPronounSwap,
  kAdpositionSwap,
  kConnectiveSwap,
  kVerbForm,
  kLexicalCohesion,
  kPunctuation,
  kGrammarInflect,
  kMask,
  kSpelling,
  kWordOrder,
};

inline constexpr std::array<Kind, 11> kAllKinds{
    Kind::kTokenNoise,     Kind::kPronounSwap,     Kind::kAdpositionSwap, Kind::kConnectiveSwap,
    Kind::kVerbForm,       Kind::kLexicalCohesion, Kind::kPunctuation,    Kind::kGrammarInflect,
    Kind::kMask,           Kind::kSpelling,        Kind::kWordOrder};

inline std::string_view kind_name(Kind k) {
  switch (k) {
    case Kind::kTokenNoise: return "token_noise";
    case Kind::kPronounSwap: return "pronoun_swap";
    case Kind::kAdpositionSwap: return "adposition_swap";
    case Kind::kConnectiveSwap: return "connective_swap";
    case Kind::kVerbForm: return "verb_form";
    case Kind::kLexicalCohesion: return "lexical_cohesion";
    case Kind::kPunctuation: return "punctuation";
    case Kind::kGrammarInflect: return "grammar_inflect";
    case Kind::kMask: return "mask";
    case Kind::kSpelling: return "spelling";
    case Kind::kWordOrder: return "word_order";
  }
  return "?";
}

inline std::optional<Kind> kind_from_name(std::string_view s) {
  for (Kind k : kAllKinds) {
    if (kind_name(k) == s) return k;
  }
  return std::nullopt;
}

inline constexpr double kMinRate = 0.0005;
inline constexpr double kMaxRate = 0.5;
inline constexpr double kDefaultRate = 0.001;

struct PerturbationPlan {
  std::vector<Kind> kinds;
  double rate = kDefaultRate;
  uint64_t seed = 0;
  lang::LanguageTag language;

  void validate() const {
    if (kinds.empty()) throw ConfigError("perturbation plan has no kinds");
    if (!(rate >= kMinRate && rate <= kMaxRate)) {
      throw ConfigError("perturbation rate " + std::to_string(rate) + " outside [0.0005, 0.5]");
    }
  }
};

// Round half up, floor of one edit for any non-empty text.
inline std::size_t token_budget(double rate, std::size_t token_count) {
  if (token_count == 0) return 0;
  const double raw = std::floor(rate * static_cast<double>(token_count) + 0.5 + 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

struct Edit {
  Kind kind = Kind::kTokenNoise;
  std::string op;
  std::size_t orig_begin = 0;  // [orig_begin, orig_end) in original tokens
  std::size_t orig_end = 0;
  std::size_t pert_begin = 0;  // [pert_begin, pert_end) in perturbed tokens
  std::size_t pert_end = 0;
  std::string original;     // original span as written, without leading space
  std::string replacement;  // replacement as written, without leading space
  std::size_t positions = 1;  // budget charged to this edit

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct EditLog {
  std::size_t token_count = 0;
  std::size_t budget = 0;
  std::size_t realized = 0;
  std::size_t shortfall = 0;  // budget - realized, when eligible positions ran out
  std::vector<Edit> edits;

  // Percentage of original token positions edited.
  double error_percentage() const {
    return token_count == 0 ? 0.0
                            : 100.0 * static_cast<double>(realized) /
                                  static_cast<double>(token_count);
  }

  Json to_json() const {
    Json j;
    j["token_count"] = token_count;
    j["budget"] = budget;
    j["realized"] = realized;
    j["shortfall"] = shortfall;
    j["edits"] = Json::array();
    for (const auto& e : edits) {
      Json je;
      je["kind"] = kind_name(e.kind);
      je["op"] = e.op;
      je["orig"] = {e.orig_begin, e.orig_end};
      je["pert"] = {e.pert_begin, e.pert_end};
      je["original"] = e.original;
      je["replacement"] = e.replacement;
      je["positions"] = e.positions;
      j["edits"].push_back(std::move(je));
    }
    return j;
  }

  static EditLog from_json(const Json& j) {
    EditLog log;
    try {
      log.token_count = j.at("token_count").get<std::size_t>();
      log.budget = j.value("budget", std::size_t{0});
      log.realized = j.value("realized", std::size_t{0});
      log.shortfall = j.value("shortfall", std::size_t{0});
      for (const auto& je : j.at("edits")) {
        Edit e;
        const auto kind = kind_from_name(je.at("kind").get<std::string>());
        if (!kind) throw CorruptLogError("unknown edit kind");
        e.kind = *kind;
        e.op = je.value("op", std::string());
        e.orig_begin = je.at("orig").at(0).get<std::size_t>();
        e.orig_end = je.at("orig").at(1).get<std::size_t>();
        e.pert_begin = je.at("pert").at(0).get<std::size_t>();
        e.pert_end = je.at("pert").at(1).get<std::size_t>();
        e.original = je.at("original").get<std::string>();
        e.replacement = je.at("replacement").get<std::string>();
        e.positions = je.value("positions", std::size_t{1});
        log.edits.push_back(std::move(e));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw CorruptLogError(std::string("malformed edit log: ") + ex.what());
    }
    return log;
  }

  friend bool operator==(const EditLog&, const EditLog&) = default;
};

// Text split into tokens plus the whitespace around them, so that rendering
// an unedited sequence gives back the input bytes.
struct TokenizedText {
  std::string lead;
  std::string trail;
  std::vector<text::Token> tokens;
};

inline TokenizedText split_text(std::string_view s) {
  TokenizedText t;
  t.tokens = text::tokenize(s);
  if (t.tokens.empty()) {
    t.lead.assign(s);
    return t;
  }
  t.lead = std::move(t.tokens.front().prefix);
  t.tokens.front().prefix.clear();
  t.trail.assign(s.substr(t.tokens.back().end));
  return t;
}

inline std::string render(const TokenizedText& t) {
  std::string out = t.lead;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    if (i > 0) out += t.tokens[i].prefix;
    out += t.tokens[i].surface;
  }
  out += t.trail;
  return out;
}

// Tokens [b, e) as written, without the whitespace before token b.
inline std::string render_span(const std::vector<text::Token>& tokens, std::size_t b,
                               std::size_t e) {
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b) out += tokens[i].prefix;
    out += tokens[i].surface;
  }
  return out;
}

// Applies sorted, non-overlapping edits to `original`, filling each edit's
// perturbed span. Throws CorruptLogError when the edits do not fit.
inline TokenizedText apply_edits(const TokenizedText& original, std::vector<Edit>& edits) {
  const auto& src = original.tokens;
  TokenizedText out;
  out.lead = original.lead;
  out.trail = original.trail;
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < edits.size(); ++k) {
    Edit& e = edits[k];
    if (e.orig_begin > e.orig_end || e.orig_end > src.size()) {
      throw CorruptLogError("edit span [" + std::to_string(e.orig_begin) + ", " +
                            std::to_string(e.orig_end) + ") outside " +
                            std::to_string(src.size()) + " tokens");
    }
    if (e.orig_begin < cursor ||
        (k > 0 && e.orig_begin == e.orig_end && edits[k - 1].orig_begin == e.orig_begin &&
         edits[k - 1].orig_end == e.orig_end)) {
      throw CorruptLogError("edit spans overlap or are out of order");
    }
    if (render_span(src, e.orig_begin, e.orig_end) != e.original) {
      throw CorruptLogError("edit " + std::to_string(k) + " original surface '" + e.original +
                            "' does not match the text");
    }
    out.tokens.insert(out.tokens.end(), src.begin() + static_cast<std::ptrdiff_t>(cursor),
                      src.begin() + static_cast<std::ptrdiff_t>(e.orig_begin));
    auto rep = text::tokenize(e.replacement);
    if (!rep.empty()) {
      rep.front().prefix = e.orig_begin < e.orig_end ? src[e.orig_begin].prefix : " ";
    }
    e.pert_begin = out.tokens.size();
    out.tokens.insert(out.tokens.end(), rep.begin(), rep.end());
    e.pert_end = out.tokens.size();
    cursor = e.orig_end;
  }
  out.tokens.insert(out.tokens.end(), src.begin() + static_cast<std::ptrdiff_t>(cursor), src.end());
  if (out.tokens.empty()) throw Error("perturbation removed every token");
  out.tokens.front().prefix.clear();
  for (std::size_t i = 1; i < out.tokens.size(); ++i) {
    auto& t = out.tokens[i];
    if (t.prefix.empty() && !t.punct && !out.tokens[i - 1].punct) t.prefix = " ";
  }
  return out;
}

struct PerturbResult {
  std::string text;
  EditLog log;
};

namespace detail {

inline std::string match_case(std::string replacement, std::string_view original) {
  if (!original.empty() && !replacement.empty() && text::is_ascii_upper(original[0]) &&
      replacement[0] >= 'a' && replacement[0] <= 'z') {
    replacement[0] = static_cast<char>(replacement[0] - 'a' + 'A');
  }
  return replacement;
}

class Perturber {
 public:
  Perturber(const TokenizedText& text, const Lexicon* lex, const InflectionTrie* trie, Rng& rng)
      : text_(text), tokens_(text.tokens), lex_(lex), trie_(trie), rng_(rng) {
    if (lex_) {
      alphabet_ = lex_->alphabet();
      for (const auto& w : lex_->random_tokens.words()) {
        if (text::has_letter(w)) letter_pool_.push_back(w);
      }
    }
    if (alphabet_.empty()) {
      for (const auto& t : tokens_) {
        for (char32_t c : text::code_points(t.surface)) {
          if (text::is_letter(c)) alphabet_.push_back(c);
        }
      }
      std::sort(alphabet_.begin(), alphabet_.end());
      alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
    }
    reset();
  }

  void reset() {
    used_.assign(tokens_.size(), false);
    live_ = tokens_.size();
    edits_.clear();
  }

  std::vector<Edit>& edits() { return edits_; }

  // Makes one edit of `kind` charging at most `max_charge` positions.
  // Returns the charge, or 0 when the kind has no eligible position left.
  std::size_t try_edit(Kind kind, std::size_t max_charge) {
    switch (kind) {
      case Kind::kTokenNoise: return token_noise();
      case Kind::kPronounSwap: return list_swap(kind, lex_->pronouns);
      case Kind::kAdpositionSwap: return list_swap(kind, lex_->adpositions);
      case Kind::kConnectiveSwap: return list_swap(kind, lex_->connectives);
      case Kind::kVerbForm: return verb_form();
      case Kind::kLexicalCohesion: return lexical_cohesion();
      case Kind::kPunctuation: return punctuation();
      case Kind::kGrammarInflect: return grammar_inflect();
      case Kind::kMask: return mask();
      case Kind::kSpelling: return spelling();
      case Kind::kWordOrder: return word_order(max_charge);
    }
    return 0;
  }

 private:
  template <typename Pred>
  std::vector<std::size_t> eligible(Pred pred) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!used_[i] && pred(tokens_[i])) out.push_back(i);
    }
    return out;
  }

  std::vector<std::string> pool_alternatives(const std::vector<std::string>& pool,
                                             std::string_view surface) const {
    std::vector<std::string> out;
    for (const auto& w : pool) {
      if (w != surface) out.push_back(w);
    }
    return out;
  }

  void replace(std::size_t i, Kind kind, std::string op, std::string replacement) {
    used_[i] = true;
    edits_.push_back(Edit{kind, std::move(op), i, i + 1, 0, 0, tokens_[i].surface,
                          std::move(replacement), 1});
  }

  std::size_t token_noise() {
    const auto& pool = lex_->random_tokens.words();
    const auto idx = eligible([](const text::Token&) { return true; });
    if (idx.empty()) return 0;
    const std::size_t i = idx[rng_.below(idx.size())];
    const auto alts = pool_alternatives(pool, tokens_[i].surface);
    std::vector<int> ops;
    if (!alts.empty()) ops.push_back(0);  // replace
    if (live_ >= 2) ops.push_back(1);     // delete
    ops.push_back(2);                     // add after token i
    switch (ops[rng_.below(ops.size())]) {
      case 0:
        replace(i, Kind::kTokenNoise, "replace", rng_.pick(alts));
        break;
      case 1:
        used_[i] = true;
        --live_;
        edits_.push_back(Edit{Kind::kTokenNoise, "delete", i, i + 1, 0, 0, tokens_[i].surface, "", 1});
        break;
      default:
        used_[i] = true;
        ++live_;
        edits_.push_back(Edit{Kind::kTokenNoise, "add", i + 1, i + 1, 0, 0, "", rng_.pick(pool), 1});
        break;
    }
    return 1;
  }

  std::size_t list_swap(Kind kind, const WordList& list) {
    const auto idx = eligible([&](const text::Token& t) {
      return list.contains(t.surface) && !list.alternatives(t.surface).empty();
    });
    if (idx.empty()) return 0;
    const std::size_t i = idx[rng_.below(idx.size())];
    const auto alts = list.alternatives(tokens_[i].surface);
    replace(i, kind, "replace", match_case(rng_.pick(alts), tokens_[i].surface));
    return 1;
  }

  std::size_t verb_form() {
    const auto idx = eligible(
        [&](const text::Token& t) { return !lex_->verb_alternatives(t.surface).empty(); });
    if (idx.empty()) return 0;
    const std::size_t i = idx[rng_.below(idx.size())];
    replace(i, Kind::kVerbForm, "replace", rng_.pick(lex_->verb_alternatives(tokens_[i].surface)));
    return 1;
  }

  bool function_word(std::string_view w) const {
    return lex_->pronouns.contains(w) || lex_->adpositions.contains(w) ||
           lex_->connectives.contains(w);
  }

  std::size_t lexical_cohesion() {
    const auto idx = eligible([&](const text::Token& t) {
      return !t.punct && text::has_letter(t.surface) && !function_word(t.surface) &&
             !pool_alternatives(letter_pool_, t.surface).empty();
    });
    if (idx.empty()) return 0;
    const std::size_t i = idx[rng_.below(idx.size())];
    replace(i, Kind::kLexicalCohesion, "replace",
            rng_.pick(pool_alternatives(letter_pool_, tokens_[i].surface)));
    return 1;
  }

  bool movable_neighbor(std::size_t j) const {
    return j < tokens_.size() && !used_[j] && !tokens_[j].punct;
  }

  std::size_t punctuation() {
    const auto ops_for = [&](std::size_t i) {
      std::vector<int> ops;
      if (live_ >= 2) ops.push_back(0);  // delete
      if (!lex_->punctuation.alternatives(tokens_[i].surface).empty()) ops.push_back(1);
      if (movable_neighbor(i + 1) || (i > 0 && movable_neighbor(i - 1))) ops.push_back(2);
      return ops;
    };
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (!used_[i] && tokens_[i].punct && !ops_for(i).empty()) idx.push_back(i);
    }
    if (idx.empty()) return 0;
    const std::size_t i = idx[rng_.below(idx.size())];
    const auto ops = ops_for(i);
    const auto& tok = tokens_[i];
    switch (ops[rng_.below(ops.size())]) {
      case 0:
        used_[i] = true;
        --live_;
        edits_.push_back(Edit{Kind::kPunctuation, "delete", i, i + 1, 0, 0, tok.surface, "", 1});
        break;
      case 1:
        replace(i, Kind::kPunctuation, "substitute",
                rng_.pick(lex_->punctuation.alternatives(tok.surface)));
        break;
      default: {
        const bool right = movable_neighbor(i + 1) && (!(i > 0 && movable_neighbor(i - 1)) ||
                                                       rng_.below(2) == 0);
        if (right) {
          used_[i] = used_[i + 1] = true;
          edits_.push_back(Edit{Kind::kPunctuation, "move", i, i + 2, 0, 0,
                                render_span(tokens_, i, i + 2),
                                tokens_[i + 1].surface + tok.surface, 1});
        } else {
          used_[i] = used_[i - 1] = true;
          edits_.push_back(Edit{Kind::kPunctuation, "move", i - 1, i + 1, 0, 0,
                                render_span(tokens_, i - 1, i + 1),
                                tok.surface + " " + tokens_[i - 1].surface, 1});
        }
        break;
      }
    }
    return 1;
  }

  std::size_t grammar_inflect() {
    const auto idx = eligible(
        [&](const text::Token& t) { return !t.punct && !trie_->query(t.surface).empty(); });
    if (idx.empty()) return 0;
    const std::size_t i = idx[rng_.below(idx.size())];
    replace(i, Kind::kGrammarInflect, "inflect", rng_.pick(trie_->query(tokens_[i].surface)));
    return 1;
  }

  std::size_t mask() {
    const auto& pool = lex_->random_tokens.words();
    const auto idx = eligible(
        [&](const text::Token& t) { return !pool_alternatives(pool, t.surface).empty(); });
    if (idx.empty()) return 0;
    const std::size_t i = idx[rng_.below(idx.size())];
    replace(i, Kind::kMask, "mask", rng_.pick(pool_alternatives(pool, tokens_[i].surface)));
    return 1;
  }

  std::size_t spelling() {
    if (alphabet_.empty()) return 0;
    const auto idx =
        eligible([](const text::Token& t) { return !t.punct && text::has_letter(t.surface); });
    if (idx.empty()) return 0;
    const std::size_t i = idx[rng_.below(idx.size())];
    auto cps = text::code_points(tokens_[i].surface);
    std::vector<std::size_t> letters;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      if (text::is_letter(cps[k])) letters.push_back(k);
    }
    std::vector<int> ops{0};  // add
    if (cps.size() >= 2) ops.push_back(1);  // remove
    if (alphabet_.size() >= 2 || (alphabet_.size() == 1 && cps[letters[0]] != alphabet_[0])) {
      ops.push_back(2);  // substitute
    }
    std::string op;
    switch (ops[rng_.below(ops.size())]) {
      case 0: {
        const auto at = rng_.below(cps.size() + 1);
        cps.insert(cps.begin() + static_cast<std::ptrdiff_t>(at), rng_.pick(alphabet_));
        op = "add_char";
        break;
      }
      case 1:
        cps.erase(cps.begin() + static_cast<std::ptrdiff_t>(rng_.below(cps.size())));
        op = "remove_char";
        break;
      default: {
        std::vector<std::size_t> subst;
        for (auto k : letters) {
          if (alphabet_.size() >= 2 || cps[k] != alphabet_[0]) subst.push_back(k);
        }
        const auto k = subst[rng_.below(subst.size())];
        std::vector<char32_t> choices;
        for (char32_t c : alphabet_) {
          if (c != cps[k]) choices.push_back(c);
        }
        cps[k] = rng_.pick(choices);
        op = "substitute_char";
        break;
      }
    }
    replace(i, Kind::kSpelling, std::move(op), text::to_utf8(cps));
    return 1;
  }

  // Reorders a contiguous group of 2-4 unused tokens. Placements that would
  // strand a single unused token next to the group are avoided when possible.
  std::size_t word_order(std::size_t max_charge) {
    struct Placement {
      std::size_t start;
      std::size_t len;
    };
    std::vector<Placement> strict, relaxed;
    std::size_t i = 0;
    while (i < tokens_.size()) {
      if (used_[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < tokens_.size() && !used_[j]) ++j;
      for (std::size_t len = 2; len <= 4 && len <= j - i; ++len) {
        for (std::size_t s = i; s + len <= j; ++s) {
          if (!has_distinct(s, len)) continue;
          const std::size_t left = s - i;
          const std::size_t right = j - (s + len);
          (left != 1 && right != 1 ? strict : relaxed).push_back({s, len});
        }
      }
      i = j;
    }
    const auto& pool = strict.empty() ? relaxed : strict;
    if (pool.empty()) return 0;
    const Placement p = pool[rng_.below(pool.size())];
    std::vector<std::size_t> order(p.len);
    for (std::size_t k = 0; k < p.len; ++k) order[k] = p.start + k;
    bool changed = false;
    for (int attempt = 0; attempt < 16 && !changed; ++attempt) {
      rng_.shuffle(order);
      changed = differs(order, p.start);
    }
    if (!changed) {
      for (std::size_t k = 0; k < p.len; ++k) order[k] = p.start + (k + 1) % p.len;
    }
    std::vector<text::Token> group;
    for (std::size_t k = 0; k < p.len; ++k) {
      text::Token t = tokens_[order[k]];
      t.prefix = t.punct ? "" : " ";
      group.push_back(std::move(t));
    }
    for (std::size_t k = 0; k < p.len; ++k) used_[p.start + k] = true;
    const std::size_t charge = std::min(p.len, max_charge);
    edits_.push_back(Edit{Kind::kWordOrder, "permute", p.start, p.start + p.len, 0, 0,
                          render_span(tokens_, p.start, p.start + p.len),
                          render_span(group, 0, group.size()), charge});
    return charge;
  }

  bool has_distinct(std::size_t s, std::size_t len) const {
    for (std::size_t k = 1; k < len; ++k) {
      if (tokens_[s + k].surface != tokens_[s].surface) return true;
    }
    return false;
  }

  bool differs(const std::vector<std::size_t>& order, std::size_t start) const {
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (tokens_[order[k]].surface != tokens_[start + k].surface) return true;
    }
    return false;
  }

  const TokenizedText& text_;
  const std::vector<text::Token>& tokens_;
  const Lexicon* lex_;
  const InflectionTrie* trie_;
  Rng& rng_;
  std::vector<char32_t> alphabet_;
  std::vector<std::string> letter_pool_;
  std::vector<bool> used_;
  std::size_t live_ = 0;
  std::vector<Edit> edits_;
};

inline void check_resources(const PerturbationPlan& plan, const Lexicon* lex,
                            const InflectionTrie* trie) {
  const std::string lang = plan.language.code_script();
  const auto need = [&](Kind k, bool ok, std::string_view what) {
    if (!ok) {
      throw ResourceError("perturbation '" + std::string(kind_name(k)) + "' needs " +
                          std::string(what) + " for " + lang);
    }
  };
  for (Kind k : plan.kinds) {
    switch (k) {
      case Kind::kTokenNoise:
      case Kind::kLexicalCohesion:
      case Kind::kMask:
        need(k, lex && !lex->random_tokens.empty(), "a random-token pool");
        break;
      case Kind::kPronounSwap: need(k, lex && !lex->pronouns.empty(), "a pronoun list"); break;
      case Kind::kAdpositionSwap:
        need(k, lex && !lex->adpositions.empty(), "an adposition list");
        break;
      case Kind::kConnectiveSwap:
        need(k, lex && !lex->connectives.empty(), "a connective list");
        break;
      case Kind::kVerbForm: need(k, lex && !lex->verb_forms.empty(), "a verb-form table"); break;
      case Kind::kPunctuation:
        need(k, lex && !lex->punctuation.empty(), "a punctuation list");
        break;
      case Kind::kGrammarInflect:
        need(k, trie != nullptr && trie->size() > 0, "an inflection trie");
        break;
      case Kind::kSpelling:
      case Kind::kWordOrder:
        break;
    }
  }
}

}  // namespace detail

// Throws ResourceError when a kind of `plan` lacks its word list or trie.
inline void check_resources(const PerturbationPlan& plan, const LexiconSet& lexicons,
                            const InflectionTrie* trie) {
  detail::check_resources(plan, lexicons.find(plan.language), trie);
}

// Kinds whose resources are all present for `tag`.
inline std::vector<Kind> available_kinds(const lang::LanguageTag& tag, const LexiconSet& lexicons,
                                         const InflectionTrie* trie) {
  std::vector<Kind> out;
  for (Kind k : kAllKinds) {
    PerturbationPlan probe{{k}, kDefaultRate, 0, tag};
    try {
      detail::check_resources(probe, lexicons.find(tag), trie);
      out.push_back(k);
    } catch (const ResourceError&) {
    }
  }
  return out;
}

inline PerturbResult apply_perturbations(std::string_view text, const PerturbationPlan& plan,
                                         const LexiconSet& lexicons,
                                         const InflectionTrie* trie = nullptr) {
  plan.validate();
  const Lexicon* lex = lexicons.find(plan.language);
  detail::check_resources(plan, lex, trie);
  const TokenizedText original = split_text(text);
  const std::size_t n = original.tokens.size();
  if (n == 0) throw ParseError("cannot perturb an empty text");

  const std::size_t budget = token_budget(plan.rate, n);
  const std::size_t m = plan.kinds.size();
  Rng rng(plan.seed);
  detail::Perturber engine(original, lex, trie, rng);

  PerturbResult result;
  std::size_t realized = 0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    engine.reset();
    realized = 0;
    std::size_t pooled = 0;
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t quota = budget / m + (k < budget % m ? 1 : 0);
      while (quota > 0) {
        const std::size_t charged = engine.try_edit(plan.kinds[k], quota);
        if (charged == 0) break;
        quota -= charged;
        realized += charged;
      }
      pooled += quota;
    }
    // Hand leftovers round-robin to kinds that still have eligible positions.
    std::vector<bool> active(m, true);
    while (pooled > 0 && std::find(active.begin(), active.end(), true) != active.end()) {
      for (std::size_t k = 0; k < m && pooled > 0; ++k) {
        if (!active[k]) continue;
        const std::size_t charged = engine.try_edit(plan.kinds[k], 1);
        if (charged == 0) {
          active[k] = false;
          continue;
        }
        pooled -= charged;
        realized += charged;
      }
    }
    auto& edits = engine.edits();
    std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
      return std::tie(a.orig_begin, a.orig_end) < std::tie(b.orig_begin, b.orig_end);
    });
    const TokenizedText perturbed = apply_edits(original, edits);
    result.text = render(perturbed);
    result.log.edits = edits;
    // Independent edits can, rarely, cancel out (delete x here, add x there).
    if (edits.empty() || result.text != text) break;
  }
  result.log.token_count = n;
  result.log.budget = budget;
  result.log.realized = realized;
  result.log.shortfall = budget - realized;
  return result;
}

// Replays a log against the original text.
inline std::string reconstruct(std::string_view original, const EditLog& log) {
  const TokenizedText src = split_text(original);
  if (log.token_count != src.tokens.size()) {
    throw CorruptLogError("log was made for " + std::to_string(log.token_count) +
                          " tokens, text has " + std::to_string(src.tokens.size()));
  }
  std::vector<Edit> edits = log.edits;
  const TokenizedText out = apply_edits(src, edits);
  for (std::size_t k = 0; k < edits.size(); ++k) {
    if (edits[k].pert_begin != log.edits[k].pert_begin ||
        edits[k].pert_end != log.edits[k].pert_end) {
      throw CorruptLogError("edit " + std::to_string(k) + " perturbed span does not replay");
    }
  }
  return render(out);
}

}  // namespace corpusforge::perturb

#endif  // CORPUSFORGE_PERTURBATION_HPP_
