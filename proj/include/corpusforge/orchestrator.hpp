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

// Sentence alignment, pivot translation and back-translation driven through
// TranslatorClient / ScorerClient. Backend calls go out in batches with a
// bounded number in flight; all selection happens afterwards, sequentially,
// so results do not depend on timing.

#ifndef CORPUSFORGE_ORCHESTRATOR_HPP_
#define CORPUSFORGE_ORCHESTRATOR_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "corpusforge/backends.hpp"
#include "corpusforge/corpus_model.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/parallel.hpp"
#include "corpusforge/seeding.hpp"
#include "json.hpp"

namespace corpusforge::augment {

using corpus::Json;
using corpus::Passage;
using corpus::Provenance;
using corpus::SentencePair;

struct BatchOptions {
  std::size_t batch_size = 64;
  std::size_t in_flight = 4;
};

namespace detail {

inline std::size_t batch_count(std::size_t n, std::size_t batch_size) {
  return batch_size == 0 ? 0 : (n + batch_size - 1) / batch_size;
}

inline std::vector<double> score_checked(ScorerClient& scorer, const std::vector<TextPair>& pairs,
                                         const LanguageTag& src, const LanguageTag& tgt) {
  auto scores = scorer.score(pairs, src, tgt);
  if (scores.size() != pairs.size()) {
    throw BackendError("scorer returned " + std::to_string(scores.size()) + " scores for " +
                       std::to_string(pairs.size()) + " pairs");
  }
  return scores;
}

inline std::vector<std::string> translate_checked(TranslatorClient& translator,
                                                  const std::vector<std::string>& texts,
                                                  const LanguageTag& src, const LanguageTag& tgt) {
  auto out = translator.translate(texts, src, tgt);
  if (out.size() != texts.size()) {
    throw BackendError("translator returned " + std::to_string(out.size()) + " texts for " +
                       std::to_string(texts.size()) + " inputs");
  }
  return out;
}

// Scores all pairs in batches; results in input order.
inline std::vector<double> score_batched(ScorerClient& scorer, const std::vector<TextPair>& pairs,
                                         const LanguageTag& src, const LanguageTag& tgt,
                                         const BatchOptions& opt) {
  const std::size_t bs = std::max<std::size_t>(1, opt.batch_size);
  const auto parts = run_batches(batch_count(pairs.size(), bs), opt.in_flight, [&](std::size_t b) {
    const auto first = pairs.begin() + static_cast<std::ptrdiff_t>(b * bs);
    const auto last = pairs.begin() + static_cast<std::ptrdiff_t>(std::min(pairs.size(), (b + 1) * bs));
    return score_checked(scorer, std::vector<TextPair>(first, last), src, tgt);
  });
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::vector<std::string> translate_batched(TranslatorClient& translator,
                                                  const std::vector<std::string>& texts,
                                                  const LanguageTag& src, const LanguageTag& tgt,
                                                  const BatchOptions& opt) {
  const std::size_t bs = std::max<std::size_t>(1, opt.batch_size);
  const auto parts = run_batches(batch_count(texts.size(), bs), opt.in_flight, [&](std::size_t b) {
    const auto first = texts.begin() + static_cast<std::ptrdiff_t>(b * bs);
    const auto last = texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(), (b + 1) * bs));
    return translate_checked(translator, std::vector<std::string>(first, last), src, tgt);
  });
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Alignment

struct AlignOptions {
  std::size_t band = 5;  // |j - i * M / N| <= band
  double threshold = 0.0;
  BatchOptions batches;
};

struct AlignedPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double score = 0.0;
  friend bool operator==(const AlignedPair&, const AlignedPair&) = default;
};

// Candidate (i, j) cells inside the scaled diagonal band, row-major.
inline std::vector<std::pair<std::size_t, std::size_t>> band_cells(std::size_t n, std::size_t m,
                                                                   std::size_t band) {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto lhs = static_cast<int64_t>(j * n) - static_cast<int64_t>(i * m);
      if (static_cast<std::size_t>(lhs < 0 ? -lhs : lhs) <= band * n) cells.emplace_back(i, j);
    }
  }
  return cells;
}

// Greedy best-score-first monotone one-to-one matching over scored cells.
// Ties go to the smaller (i, j). Output is sorted by i.
inline std::vector<AlignedPair> greedy_monotone_matching(std::vector<AlignedPair> cells,
                                                         double threshold) {
  std::erase_if(cells, [&](const AlignedPair& c) { return !(c.score >= threshold); });
  std::stable_sort(cells.begin(), cells.end(), [](const AlignedPair& a, const AlignedPair& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  std::vector<AlignedPair> chosen;
  for (const auto& c : cells) {
    const bool ok = std::all_of(chosen.begin(), chosen.end(), [&](const AlignedPair& a) {
      return (c.i < a.i && c.j < a.j) || (c.i > a.i && c.j > a.j);
    });
    if (ok) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const AlignedPair& a, const AlignedPair& b) { return a.i < b.i; });
  return chosen;
}

inline std::vector<AlignedPair> align_sentences(const std::vector<std::string>& src,
                                                const std::vector<std::string>& tgt,
                                                ScorerClient& scorer, const LanguageTag& src_tag,
                                                const LanguageTag& tgt_tag,
                                                const AlignOptions& options = {}) {
  if (src.empty() || tgt.empty()) throw ConfigError("align_sentences needs two non-empty lists");
  const auto cells = band_cells(src.size(), tgt.size(), options.band);
  std::vector<TextPair> pairs;
  pairs.reserve(cells.size());
  for (const auto& [i, j] : cells) pairs.emplace_back(src[i], tgt[j]);
  const auto scores = detail::score_batched(scorer, pairs, src_tag, tgt_tag, options.batches);
  std::vector<AlignedPair> scored;
  scored.reserve(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    scored.push_back({cells[k].first, cells[k].second, scores[k]});
  }
  return greedy_monotone_matching(std::move(scored), options.threshold);
}

// ---------------------------------------------------------------------------
// Pivot translation

struct PivotOptions {
  BatchOptions batches;
  // JSONL file of finished batches; reused on the next run with the same input.
  std::filesystem::path checkpoint;
};

struct PivotThreshold {
  LanguageTag src_tag;
  LanguageTag tgt_tag;
  double mean = 0.0;
  std::size_t batch_size = 0;  // pairs the mean was taken over
  std::size_t kept = 0;
};

struct PivotResult {
  std::vector<SentencePair> pairs;
  std::vector<PivotThreshold> thresholds;
  std::size_t resumed_batches = 0;
};

namespace detail {

struct PivotBatch {
  std::vector<std::string> texts;
  std::vector<double> scores;
};

inline uint64_t batch_digest(const std::vector<std::string>& pivots,
                             const std::vector<std::string>& others) {
  uint64_t h = fnv1a64("pivot-batch");
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    h = fnv1a64(pivots[k], h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(others[k], h);
    h = fnv1a64("\x1e", h);
  }
  return h;
}

inline std::map<std::size_t, std::pair<uint64_t, PivotBatch>> load_checkpoint(
    const std::filesystem::path& path) {
  std::map<std::size_t, std::pair<uint64_t, PivotBatch>> done;
  if (path.empty() || !std::filesystem::exists(path)) return done;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      PivotBatch b{j.at("texts").get<std::vector<std::string>>(),
                   j.at("scores").get<std::vector<double>>()};
      done[j.at("batch").get<std::size_t>()] = {j.at("digest").get<uint64_t>(), std::move(b)};
    } catch (const nlohmann::json::exception&) {
      break;  // torn final line from an interrupted run
    }
  }
  return done;
}

}  // namespace detail

// Translates the pivot side of each pair into `target`, scores (other side,
// translation), and keeps pairs scoring at least the mean over their
// language pair. Pairs that do not contain `pivot` on either side are
// skipped.
inline PivotResult pivot_translate(const std::vector<SentencePair>& pairs, const LanguageTag& pivot,
                                   const LanguageTag& target, TranslatorClient& translator,
                                   ScorerClient& scorer, const PivotOptions& options = {}) {
  PivotResult result;
  struct Item {
    const SentencePair* pair;
    std::string pivot_text;
    std::string other_text;
    LanguageTag other_tag;
  };
  // Group by the non-pivot language, keeping first-seen order.
  std::vector<LanguageTag> groups;
  std::map<LanguageTag, std::vector<Item>> by_group;
  for (const auto& p : pairs) {
    Item it{&p, "", "", {}};
    if (p.tgt_tag == pivot) {
      it = {&p, p.tgt_text, p.src_text, p.src_tag};
    } else if (p.src_tag == pivot) {
      it = {&p, p.src_text, p.tgt_text, p.tgt_tag};
    } else {
      continue;
    }
    if (!by_group.count(it.other_tag)) groups.push_back(it.other_tag);
    by_group[it.other_tag].push_back(std::move(it));
  }
  if (groups.empty()) return result;

  // Flatten into one batch sequence so the checkpoint indexes are global.
  std::vector<const Item*> flat;
  for (const auto& g : groups) {
    for (const auto& it : by_group[g]) flat.push_back(&it);
  }
  const std::size_t bs = std::max<std::size_t>(1, options.batches.batch_size);
  // Batches never straddle two language groups.
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  {
    std::size_t start = 0;
    for (const auto& g : groups) {
      const std::size_t n = by_group[g].size();
      for (std::size_t k = 0; k < n; k += bs) bounds.emplace_back(start + k, start + std::min(n, k + bs));
      start += n;
    }
  }
  auto done = detail::load_checkpoint(options.checkpoint);
  std::mutex mu;
  std::ofstream ckpt;
  if (!options.checkpoint.empty()) ckpt.open(options.checkpoint, std::ios::app);

  const auto batches = run_batches(bounds.size(), options.batches.in_flight, [&](std::size_t b) {
    const auto [lo, hi] = bounds[b];
    std::vector<std::string> pivots, others;
    for (std::size_t k = lo; k < hi; ++k) {
      pivots.push_back(flat[k]->pivot_text);
      others.push_back(flat[k]->other_text);
    }
    const uint64_t digest = detail::batch_digest(pivots, others);
    {
      std::lock_guard<std::mutex> lock(mu);
      const auto it = done.find(b);
      if (it != done.end() && it->second.first == digest &&
          it->second.second.texts.size() == pivots.size() &&
          it->second.second.scores.size() == pivots.size()) {
        ++result.resumed_batches;
        return it->second.second;
      }
    }
    const LanguageTag& other_tag = flat[lo]->other_tag;
    detail::PivotBatch out;
    out.texts = detail::translate_checked(translator, pivots, pivot, target);
    std::vector<TextPair> scored;
    for (std::size_t k = 0; k < pivots.size(); ++k) scored.emplace_back(others[k], out.texts[k]);
    out.scores = detail::score_checked(scorer, scored, other_tag, target);
    if (ckpt.is_open()) {
      Json j;
      j["batch"] = b;
      j["digest"] = digest;
      j["texts"] = out.texts;
      j["scores"] = out.scores;
      std::lock_guard<std::mutex> lock(mu);
      ckpt << j.dump() << '\n';
      ckpt.flush();
    }
    return out;
  });

  std::vector<std::string> texts;
  std::vector<double> scores;
  for (const auto& b : batches) {
    texts.insert(texts.end(), b.texts.begin(), b.texts.end());
    scores.insert(scores.end(), b.scores.begin(), b.scores.end());
  }
  std::size_t start = 0;
  for (const auto& g : groups) {
    const std::size_t n = by_group[g].size();
    double sum = 0.0;
    for (std::size_t k = start; k < start + n; ++k) sum += scores[k];
    PivotThreshold th{g, target, sum / static_cast<double>(n), n, 0};
    for (std::size_t k = start; k < start + n; ++k) {
      if (!(scores[k] >= th.mean)) continue;
      const Item& it = *flat[k];
      SentencePair out;
      out.id = it.pair->id;
      out.src_tag = it.other_tag;
      out.tgt_tag = target;
      out.src_text = it.other_text;
      out.tgt_text = texts[k];
      out.domain = it.pair->domain;
      out.provenance = Provenance::kPivot;
      // Pair scores live on the 1-100 scale.
      out.score = std::clamp(scores[k], corpus::kMinScore, corpus::kMaxScore);
      result.pairs.push_back(std::move(out));
      ++th.kept;
    }
    result.thresholds.push_back(th);
    start += n;
  }
  return result;
}

inline Json thresholds_to_json(const std::vector<PivotThreshold>& ths) {
  Json arr = Json::array();
  for (const auto& t : ths) {
    Json j;
    j["src_tag"] = lang::format_tag(t.src_tag);
    j["tgt_tag"] = lang::format_tag(t.tgt_tag);
    j["mean"] = t.mean;
    j["batch_size"] = t.batch_size;
    j["kept"] = t.kept;
    arr.push_back(std::move(j));
  }
  return arr;
}

// ---------------------------------------------------------------------------
// Back-translation

// Returns the translator to use in round r (0-based). Lets a caller swap in
// a retrained system between rounds.
using TranslatorFactory = std::function<std::shared_ptr<TranslatorClient>(std::size_t round)>;

struct BtOptions {
  std::size_t rounds = 5;
  BatchOptions batches;
};

struct BtRound {
  std::size_t round = 0;
  bool failed = false;
  std::string error;
  std::vector<std::string> translations;
  std::vector<double> scores;
};

struct BTState {
  std::size_t iteration = 0;  // rounds attempted
  std::vector<std::optional<std::size_t>> best_round;
  std::vector<std::string> best_translation;
  std::vector<double> best_score;
  std::vector<BtRound> audit;
};

struct BtResult {
  std::vector<SentencePair> pairs;  // one per text that has a selection
  BTState state;
};

// `mono` is text in `mono_tag`. Each round translates it into `other_tag`
// and scores (translation, original). Per text the best-scoring round wins,
// the earliest on ties. Emitted pairs put the translation on the source
// side and the original text on the target side.
inline BtResult iterative_back_translate(const std::vector<std::string>& mono,
                                         const LanguageTag& mono_tag, const LanguageTag& other_tag,
                                         const TranslatorFactory& factory, ScorerClient& scorer,
                                         const BtOptions& options = {}) {
  if (options.rounds < 1) throw ConfigError("back-translation needs at least one round");
  BtResult result;
  BTState& st = result.state;
  const std::size_t n = mono.size();
  st.best_round.assign(n, std::nullopt);
  st.best_translation.assign(n, "");
  st.best_score.assign(n, 0.0);
  for (std::size_t r = 0; r < options.rounds; ++r) {
    BtRound round;
    round.round = r;
    try {
      auto translator = factory(r);
      if (!translator) throw BackendError("no translator for round " + std::to_string(r));
      round.translations =
          detail::translate_batched(*translator, mono, mono_tag, other_tag, options.batches);
      std::vector<TextPair> pairs;
      pairs.reserve(n);
      for (std::size_t k = 0; k < n; ++k) pairs.emplace_back(round.translations[k], mono[k]);
      round.scores = detail::score_batched(scorer, pairs, other_tag, mono_tag, options.batches);
    } catch (const std::exception& e) {
      round.failed = true;
      round.error = e.what();
      round.translations.clear();
      round.scores.clear();
    }
    st.iteration = r + 1;
    if (!round.failed) {
      for (std::size_t k = 0; k < n; ++k) {
        if (!st.best_round[k] || round.scores[k] > st.best_score[k]) {
          st.best_round[k] = r;
          st.best_translation[k] = round.translations[k];
          st.best_score[k] = round.scores[k];
        }
      }
    }
    st.audit.push_back(std::move(round));
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!st.best_round[k]) continue;
    SentencePair p;
    p.id = std::to_string(k + 1);
    p.src_tag = other_tag;
    p.tgt_tag = mono_tag;
    p.src_text = st.best_translation[k];
    p.tgt_text = mono[k];
    p.provenance = Provenance::kBacktranslated;
    p.score = std::clamp(st.best_score[k], corpus::kMinScore, corpus::kMaxScore);
    result.pairs.push_back(std::move(p));
  }
  return result;
}

struct ParagraphResult {
  std::vector<Passage> passages;        // translated, same sentence count as the input
  std::vector<std::string> incomplete;  // ids of passages with an untranslated sentence
  std::vector<BTState> states;          // one per source language, in tag order
};

// Back-translates every sentence of every passage, keeps each sentence's
// best round, and reassembles the passages in their original order.
inline ParagraphResult paragraph_back_translate(const std::vector<Passage>& passages,
                                                const LanguageTag& other_tag,
                                                const TranslatorFactory& factory,
                                                ScorerClient& scorer, const BtOptions& options = {}) {
  if (passages.empty()) throw ConfigError("paragraph back-translation needs passages");
  ParagraphResult out;
  // Sentences are flattened per source language so each backend call has
  // one language pair.
  std::map<LanguageTag, std::vector<std::pair<std::size_t, std::size_t>>> where;
  std::map<LanguageTag, std::vector<std::string>> flat;
  for (std::size_t p = 0; p < passages.size(); ++p) {
    for (std::size_t s = 0; s < passages[p].sentences.size(); ++s) {
      where[passages[p].tag].emplace_back(p, s);
      flat[passages[p].tag].push_back(passages[p].sentences[s]);
    }
  }
  out.passages.resize(passages.size());
  std::vector<bool> complete(passages.size(), true);
  for (std::size_t p = 0; p < passages.size(); ++p) {
    out.passages[p].id = passages[p].id;
    out.passages[p].tag = other_tag;
    out.passages[p].domain = passages[p].domain;
    out.passages[p].sentences.resize(passages[p].sentences.size());
  }
  for (const auto& [tag, texts] : flat) {
    auto bt = iterative_back_translate(texts, tag, other_tag, factory, scorer, options);
    const auto& loc = where[tag];
    for (std::size_t k = 0; k < texts.size(); ++k) {
      const auto [p, s] = loc[k];
      if (bt.state.best_round[k]) {
        out.passages[p].sentences[s] = bt.state.best_translation[k];
      } else {
        complete[p] = false;
      }
    }
    out.states.push_back(std::move(bt.state));
  }
  for (std::size_t p = 0; p < passages.size(); ++p) {
    if (!complete[p]) out.incomplete.push_back(passages[p].id);
  }
  return out;
}

// Single-translator convenience: every round uses `translator`.
inline TranslatorFactory fixed_translator(std::shared_ptr<TranslatorClient> translator) {
  return [translator](std::size_t) { return translator; };
}

}  // namespace corpusforge::augment

#endif  // CORPUSFORGE_ORCHESTRATOR_HPP_
