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

// Parallel-corpus cleaning stack: length, language/script, markup and QE
// score filters, composed into a chunked pipeline with per-pair verdicts.

#ifndef CORPUSFORGE_CLEANING_FILTERS_HPP_
#define CORPUSFORGE_CLEANING_FILTERS_HPP_

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "corpusforge/backends.hpp"
#include "corpusforge/corpus_model.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/parallel.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge::clean {

using corpus::CorpusStats;
using corpus::SentencePair;
using lang::LanguageTag;

enum class Stage { kLength, kLanguageScript, kMarkup, kQeScore };

inline constexpr Stage kStageOrder[] = {Stage::kLength, Stage::kLanguageScript, Stage::kMarkup,
                                        Stage::kQeScore};

inline std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kLength: return "length";
    case Stage::kLanguageScript: return "language_script";
    case Stage::kMarkup: return "markup";
    case Stage::kQeScore: return "qe_score";
  }
  return "?";
}

inline std::optional<Stage> stage_from_name(std::string_view s) {
  for (Stage st : kStageOrder) {
    if (stage_name(st) == s) return st;
  }
  return std::nullopt;
}

struct FilterPolicy {
  int max_word_delta = 10;
  // Unset means max_word_delta times the mean word length of the batch side
  // with fewer characters.
  std::optional<double> max_char_delta;
  double majority_fraction = 0.5;  // strict: share must exceed it
  double qe_margin = 10.0;
  std::set<Stage> stages{Stage::kLength, Stage::kLanguageScript, Stage::kMarkup, Stage::kQeScore};
  std::size_t chunk_size = 10000;
  // Take scores already carried by pairs instead of calling the scorer.
  bool use_attached_scores = true;

  void validate() const {
    if (max_word_delta < 0) throw ConfigError("max_word_delta must be >= 0");
    if (max_char_delta && *max_char_delta < 0) throw ConfigError("max_char_delta must be >= 0");
    if (!(majority_fraction > 0.0 && majority_fraction <= 1.0)) {
      throw ConfigError("majority_fraction must lie in (0, 1]");
    }
    if (!(qe_margin >= 0.0)) throw ConfigError("qe_margin must be >= 0");
    if (chunk_size == 0) throw ConfigError("chunk_size must be positive");
  }

  bool enabled(Stage s) const { return stages.count(s) != 0; }
};

struct FilterVerdict {
  std::string pair_id;
  bool kept = true;
  std::optional<Stage> reason;  // set iff !kept
  std::string detail;

  static FilterVerdict keep(std::string id) { return FilterVerdict{std::move(id), true, {}, {}}; }
  static FilterVerdict reject(std::string id, Stage s, std::string detail) {
    return FilterVerdict{std::move(id), false, s, std::move(detail)};
  }

  corpus::Json to_json() const {
    corpus::Json j;
    j["id"] = pair_id;
    j["kept"] = kept;
    if (reason) j["reason"] = stage_name(*reason);
    if (!detail.empty()) j["detail"] = detail;
    return j;
  }

  friend bool operator==(const FilterVerdict&, const FilterVerdict&) = default;
};

// ---------------------------------------------------------------------------
// Length

struct LengthCounts {
  std::size_t words = 0;
  std::size_t chars = 0;  // non-whitespace code points
};

inline LengthCounts length_counts(std::string_view s) {
  LengthCounts c;
  bool in_word = false;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto cp = text::next_code_point(s, pos);
    const bool space = cp && text::is_space(*cp);
    if (!space) {
      ++c.chars;
      if (!in_word) ++c.words;
    }
    in_word = !space;
  }
  return c;
}

// Character threshold derived from a batch: max_word_delta times the mean
// word length of whichever side has fewer characters in total.
inline double derived_char_delta(std::span<const SentencePair> batch, int max_word_delta) {
  LengthCounts src, tgt;
  for (const auto& p : batch) {
    const auto a = length_counts(p.src_text);
    const auto b = length_counts(p.tgt_text);
    src.words += a.words;
    src.chars += a.chars;
    tgt.words += b.words;
    tgt.chars += b.chars;
  }
  const LengthCounts& side = src.chars <= tgt.chars ? src : tgt;
  if (side.words == 0) return 0.0;
  return max_word_delta * static_cast<double>(side.chars) / static_cast<double>(side.words);
}

inline double char_delta_for(const FilterPolicy& policy, std::span<const SentencePair> batch) {
  return policy.max_char_delta ? *policy.max_char_delta
                               : derived_char_delta(batch, policy.max_word_delta);
}

inline FilterVerdict length_filter(const SentencePair& pair, const FilterPolicy& policy,
                                   std::optional<double> char_delta = std::nullopt) {
  const double max_chars = char_delta ? *char_delta : char_delta_for(policy, {&pair, 1});
  const auto a = length_counts(pair.src_text);
  const auto b = length_counts(pair.tgt_text);
  const auto dw = a.words > b.words ? a.words - b.words : b.words - a.words;
  const auto dc = a.chars > b.chars ? a.chars - b.chars : b.chars - a.chars;
  if (dw > static_cast<std::size_t>(policy.max_word_delta)) {
    return FilterVerdict::reject(pair.id, Stage::kLength,
                                 "word delta " + std::to_string(dw) + " > " +
                                     std::to_string(policy.max_word_delta));
  }
  if (static_cast<double>(dc) > max_chars) {
    return FilterVerdict::reject(pair.id, Stage::kLength,
                                 "char delta " + std::to_string(dc) + " > " +
                                     std::to_string(max_chars));
  }
  return FilterVerdict::keep(pair.id);
}

// ---------------------------------------------------------------------------
// Language / script

class WordLanguageClassifier {
 public:
  virtual ~WordLanguageClassifier() = default;
  // Tag of `word`, or nullopt when undecidable. Must be deterministic.
  virtual std::optional<LanguageTag> classify(std::string_view word,
                                              std::span<const LanguageTag> candidates) const = 0;
};

// Built-in classifier: the word's dominant Unicode script picks the first
// candidate written in that script. A script none of the candidates use
// yields a registry tag for that script, or an "und" tag when the script is
// not in the registry at all. Words without letters are undecidable.
class ScriptBlockClassifier : public WordLanguageClassifier {
 public:
  explicit ScriptBlockClassifier(const lang::Registry& registry = lang::Registry::bundled())
      : registry_(registry) {}

  std::optional<LanguageTag> classify(std::string_view word,
                                      std::span<const LanguageTag> candidates) const override {
    const auto share = lang::dominant_script(word);
    if (!share) return std::nullopt;
    for (const auto& c : candidates) {
      if (c.script == share->script) return c;
    }
    if (const auto* info = registry_.first_with_script(share->script)) return info->tag;
    return LanguageTag{lang::Family::kWestGermanic, "und", share->script, false};
  }

 private:
  const lang::Registry& registry_;
};

struct SideAgreement {
  std::size_t matching = 0;
  std::size_t decided = 0;  // words not classified unknown
};

inline SideAgreement side_agreement(std::string_view text, const LanguageTag& declared,
                                    const LanguageTag& other,
                                    const WordLanguageClassifier& classifier) {
  const LanguageTag candidates[] = {declared, other};
  SideAgreement a;
  for (auto word : text::split_words(text)) {
    std::optional<LanguageTag> tag;
    try {
      tag = classifier.classify(word, candidates);
    } catch (const std::exception&) {
      tag.reset();  // classifier failure counts as unknown
    }
    if (!tag) continue;
    ++a.decided;
    if (*tag == declared) ++a.matching;
  }
  return a;
}

inline bool side_passes(const SideAgreement& a, double majority_fraction) {
  if (a.decided == 0) return true;
  const double share = static_cast<double>(a.matching) / static_cast<double>(a.decided);
  return share > majority_fraction || a.matching == a.decided;
}

inline FilterVerdict language_script_filter(const SentencePair& pair,
                                            const WordLanguageClassifier& classifier,
                                            const FilterPolicy& policy) {
  const auto src = side_agreement(pair.src_text, pair.src_tag, pair.tgt_tag, classifier);
  if (!side_passes(src, policy.majority_fraction)) {
    return FilterVerdict::reject(pair.id, Stage::kLanguageScript,
                                 "source " + std::to_string(src.matching) + "/" +
                                     std::to_string(src.decided) + " words match " +
                                     lang::format_tag(pair.src_tag));
  }
  const auto tgt = side_agreement(pair.tgt_text, pair.tgt_tag, pair.src_tag, classifier);
  if (!side_passes(tgt, policy.majority_fraction)) {
    return FilterVerdict::reject(pair.id, Stage::kLanguageScript,
                                 "target " + std::to_string(tgt.matching) + "/" +
                                     std::to_string(tgt.decided) + " words match " +
                                     lang::format_tag(pair.tgt_tag));
  }
  return FilterVerdict::keep(pair.id);
}

// ---------------------------------------------------------------------------
// Markup

enum class TagKind { kOpen, kClose, kSelfClosing };

struct MarkupTag {
  std::string name;  // lower-cased
  TagKind kind;
  friend auto operator<=>(const MarkupTag&, const MarkupTag&) = default;
};

// Tags shaped like <name ...>, </name> or <name .../>: a letter must follow
// the '<' (after an optional '/'), so "a < b" is not markup.
inline std::vector<MarkupTag> extract_tags(std::string_view s) {
  std::vector<MarkupTag> tags;
  std::size_t i = 0;
  while ((i = s.find('<', i)) != std::string_view::npos) {
    std::size_t j = i + 1;
    bool closing = false;
    if (j < s.size() && s[j] == '/') {
      closing = true;
      ++j;
    }
    const auto is_alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
    if (j >= s.size() || !is_alpha(s[j])) {
      ++i;
      continue;
    }
    const std::size_t close = s.find_first_of("<>", j);
    if (close == std::string_view::npos || s[close] == '<') {
      i = close == std::string_view::npos ? s.size() : close;
      continue;
    }
    std::size_t k = j;
    const auto is_name = [&](char c) {
      return is_alpha(c) || (c >= '0' && c <= '9') || c == ':' || c == '_' || c == '-';
    };
    while (k < close && is_name(s[k])) ++k;
    MarkupTag tag{text::ascii_lower(s.substr(j, k - j)), TagKind::kOpen};
    if (closing) {
      tag.kind = TagKind::kClose;
    } else if (s[close - 1] == '/') {
      tag.kind = TagKind::kSelfClosing;
    }
    tags.push_back(std::move(tag));
    i = close + 1;
  }
  std::sort(tags.begin(), tags.end());
  return tags;
}

inline FilterVerdict markup_filter(const SentencePair& pair) {
  // Fast path: no '<' on either side.
  if (pair.src_text.find('<') == std::string::npos &&
      pair.tgt_text.find('<') == std::string::npos) {
    return FilterVerdict::keep(pair.id);
  }
  const auto a = extract_tags(pair.src_text);
  const auto b = extract_tags(pair.tgt_text);
  if (a != b) {
    return FilterVerdict::reject(pair.id, Stage::kMarkup,
                                 std::to_string(a.size()) + " source tags vs " +
                                     std::to_string(b.size()) + " target tags");
  }
  return FilterVerdict::keep(pair.id);
}

// ---------------------------------------------------------------------------
// QE score

struct QeThreshold {
  double mean = 0.0;
  double threshold = 0.0;
  std::size_t scored = 0;
};

// Threshold is mean(scores) - margin over every scored pair of the batch,
// fixed before any rejection. Unscored pairs are rejected as "unscored".
inline std::vector<FilterVerdict> qe_filter(std::span<const SentencePair> batch,
                                            const FilterPolicy& policy,
                                            QeThreshold* threshold_out = nullptr) {
  QeThreshold t;
  double sum = 0.0;
  for (const auto& p : batch) {
    if (p.score) {
      sum += *p.score;
      ++t.scored;
    }
  }
  if (t.scored > 0) t.mean = sum / static_cast<double>(t.scored);
  t.threshold = t.mean - policy.qe_margin;
  std::vector<FilterVerdict> out;
  out.reserve(batch.size());
  for (const auto& p : batch) {
    if (!p.score) {
      out.push_back(FilterVerdict::reject(p.id, Stage::kQeScore, "unscored"));
    } else if (*p.score >= t.threshold) {
      out.push_back(FilterVerdict::keep(p.id));
    } else {
      out.push_back(FilterVerdict::reject(
          p.id, Stage::kQeScore,
          "score " + std::to_string(*p.score) + " < threshold " + std::to_string(t.threshold)));
    }
  }
  if (threshold_out) *threshold_out = t;
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct ChunkThreshold {
  std::size_t chunk = 0;
  std::string src_tag;
  std::string tgt_tag;
  QeThreshold qe;
};

// Runs the enabled stages in the fixed order length, language_script,
// markup, qe_score over chunks of the input. The first failing stage decides
// the reason. QE means are per (src_tag, tgt_tag) group within a chunk, over
// the pairs that reached the QE stage.
class CleanPipeline {
 public:
  using Source = std::function<std::optional<SentencePair>()>;
  using KeptSink = std::function<void(const SentencePair&)>;
  using VerdictSink = std::function<void(const FilterVerdict&)>;

  CleanPipeline(FilterPolicy policy, const WordLanguageClassifier& classifier,
                augment::ScorerClient* scorer = nullptr, std::size_t jobs = 1)
      : policy_(std::move(policy)), classifier_(classifier), scorer_(scorer), jobs_(jobs) {
    policy_.validate();
    if (policy_.enabled(Stage::kQeScore) && scorer_ == nullptr && !policy_.use_attached_scores) {
      throw ConfigError("qe_score stage enabled but no scorer is configured");
    }
  }

  CorpusStats run(const Source& source, const KeptSink& on_kept, const VerdictSink& on_verdict) {
    CorpusStats stats;
    std::vector<SentencePair> chunk;
    std::size_t chunk_index = 0;
    const auto flush = [&] {
      if (chunk.empty()) return;
      process_chunk(chunk, chunk_index++, stats, on_kept, on_verdict);
      chunk.clear();
    };
    while (auto pair = source()) {
      chunk.push_back(std::move(*pair));
      if (chunk.size() >= policy_.chunk_size) flush();
    }
    flush();
    return stats;
  }

  const std::vector<ChunkThreshold>& thresholds() const { return thresholds_; }
  const FilterPolicy& policy() const { return policy_; }

 private:
  void process_chunk(std::vector<SentencePair>& chunk, std::size_t chunk_index, CorpusStats& stats,
                     const KeptSink& on_kept, const VerdictSink& on_verdict) {
    const double char_delta = char_delta_for(policy_, chunk);
    std::vector<std::size_t> idx(chunk.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<FilterVerdict> verdicts = parallel_map(idx, jobs_, [&](std::size_t i) {
      const SentencePair& p = chunk[i];
      if (policy_.enabled(Stage::kLength)) {
        auto v = length_filter(p, policy_, char_delta);
        if (!v.kept) return v;
      }
      if (policy_.enabled(Stage::kLanguageScript)) {
        auto v = language_script_filter(p, classifier_, policy_);
        if (!v.kept) return v;
      }
      if (policy_.enabled(Stage::kMarkup)) {
        auto v = markup_filter(p);
        if (!v.kept) return v;
      }
      return FilterVerdict::keep(p.id);
    });

    if (policy_.enabled(Stage::kQeScore)) apply_qe(chunk, chunk_index, verdicts);

    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (verdicts[i].kept) {
        stats.keep();
        if (on_kept) on_kept(chunk[i]);
      } else {
        stats.reject(std::string(stage_name(*verdicts[i].reason)));
      }
      if (on_verdict) on_verdict(verdicts[i]);
    }
  }

  void apply_qe(std::vector<SentencePair>& chunk, std::size_t chunk_index,
                std::vector<FilterVerdict>& verdicts) {
    // Group survivors by language pair, preserving input order in each group.
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (!verdicts[i].kept) continue;
      groups[{lang::format_tag(chunk[i].src_tag), lang::format_tag(chunk[i].tgt_tag)}].push_back(i);
    }
    for (auto& [key, members] : groups) {
      std::vector<SentencePair> batch;
      batch.reserve(members.size());
      std::vector<std::size_t> need_score;
      for (std::size_t k = 0; k < members.size(); ++k) {
        SentencePair p = chunk[members[k]];
        if (!policy_.use_attached_scores) p.score.reset();
        if (!p.score && scorer_) need_score.push_back(k);
        batch.push_back(std::move(p));
      }
      if (!need_score.empty()) {
        std::vector<augment::TextPair> texts;
        for (auto k : need_score) texts.emplace_back(batch[k].src_text, batch[k].tgt_text);
        const auto scores = scorer_->score(texts, batch.front().src_tag, batch.front().tgt_tag);
        if (scores.size() != texts.size()) {
          throw BackendError("scorer returned " + std::to_string(scores.size()) +
                             " scores for " + std::to_string(texts.size()) + " pairs");
        }
        for (std::size_t n = 0; n < need_score.size(); ++n) {
          batch[need_score[n]].score = scores[n];
          chunk[members[need_score[n]]].score = scores[n];
        }
      }
      QeThreshold t;
      auto qe = qe_filter(batch, policy_, &t);
      thresholds_.push_back(ChunkThreshold{chunk_index, key.first, key.second, t});
      for (std::size_t k = 0; k < members.size(); ++k) verdicts[members[k]] = std::move(qe[k]);
    }
  }

  FilterPolicy policy_;
  const WordLanguageClassifier& classifier_;
  augment::ScorerClient* scorer_;
  std::size_t jobs_;
  std::vector<ChunkThreshold> thresholds_;
};

struct CleanResult {
  std::vector<SentencePair> kept;
  std::vector<FilterVerdict> verdicts;
  CorpusStats stats;
};

inline CleanResult run_clean_pipeline(const std::vector<SentencePair>& pairs,
                                      const FilterPolicy& policy,
                                      const WordLanguageClassifier& classifier,
                                      augment::ScorerClient* scorer = nullptr,
                                      std::size_t jobs = 1) {
  CleanPipeline pipeline(policy, classifier, scorer, jobs);
  CleanResult out;
  std::size_t next = 0;
  out.stats = pipeline.run(
      [&]() -> std::optional<SentencePair> {
        if (next >= pairs.size()) return std::nullopt;
        return pairs[next++];
      },
      [&](const SentencePair& p) { out.kept.push_back(p); },
      [&](const FilterVerdict& v) { out.verdicts.push_back(v); });
  return out;
}

}  // namespace corpusforge::clean

#endif  // CORPUSFORGE_CLEANING_FILTERS_HPP_
