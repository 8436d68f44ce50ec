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

// Builders for the seven task records (translation, grammar correction,
// post-editing, error marking, error marking + correction, direct
// assessment, quality estimation), error-span markup, and the synthetic
// direct-assessment score.

#ifndef CORPUSFORGE_SYNTHETIC_TASKS_HPP_
#define CORPUSFORGE_SYNTHETIC_TASKS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpusforge/corpus_model.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/inflection_trie.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/lexicon.hpp"
#include "corpusforge/metrics.hpp"
#include "corpusforge/perturbation.hpp"
#include "corpusforge/seeding.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge::synth {

using corpus::SentencePair;
using corpus::TaskRecord;
using lang::format_tag;
using lang::LanguageTag;
using metrics::Span;
using metrics::SpanSet;

inline constexpr std::string_view kTranslationTask = "Translation";
inline constexpr std::string_view kCorrectionTask = "Correction";
inline constexpr std::string_view kPostEditTask = "Translation post editing";
inline constexpr std::string_view kDirectAssessmentTask = "Translation direct assessment";
inline constexpr std::string_view kQualityEstimationTask = "Translation quality estimation";
inline constexpr std::string_view kErrorMarkTask = "Translation error marking";
inline constexpr std::string_view kErrorMarkCorrectTask = "Translation error marking and correction";

inline constexpr std::string_view kDaScoreKey = "direct assessment score out of 100";
inline constexpr std::string_view kQeScoreKey = "quality estimation score out of 100";

inline constexpr double kApeMinRate = 0.02;
inline constexpr double kApeMaxRate = 0.15;
inline constexpr double kDaMinRate = 0.05;
inline constexpr double kDaMaxRate = 0.5;

enum class TaskKind { kGec, kApe, kErrMark, kErrMarkCorrect, kDa, kQe, kTranslation };

inline constexpr std::array<TaskKind, 7> kAllTasks{TaskKind::kGec,     TaskKind::kApe,
                                                   TaskKind::kErrMark, TaskKind::kErrMarkCorrect,
                                                   TaskKind::kDa,      TaskKind::kQe,
                                                   TaskKind::kTranslation};

inline std::string_view task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::kGec: return "gec";
    case TaskKind::kApe: return "ape";
    case TaskKind::kErrMark: return "errmark";
    case TaskKind::kErrMarkCorrect: return "errmark-correct";
    case TaskKind::kDa: return "da";
    case TaskKind::kQe: return "qe";
    case TaskKind::kTranslation: return "translation";
  }
  return "?";
}

inline std::optional<TaskKind> task_kind_from_name(std::string_view s) {
  for (TaskKind k : kAllTasks) {
    if (task_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

// Scores are written with five decimals.
inline double round_score(double x) { return std::round(x * 1e5) / 1e5; }

inline std::string post_edited_key(const LanguageTag& tgt) { return "post edited " + format_tag(tgt); }
inline std::string error_marked_key(const LanguageTag& tgt) {
  return "error marked " + format_tag(tgt);
}

// ---------------------------------------------------------------------------
// Span markup

inline constexpr std::string_view kOpenTag = "<e>";
inline constexpr std::string_view kCloseTag = "</e>";

namespace detail {

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace detail

// '&' and literal tags are entity-escaped so that the markup stays
// unambiguous.
inline std::string escape_markup(std::string_view s) {
  std::string out(s);
  detail::replace_all(out, "&", "&amp;");
  detail::replace_all(out, kCloseTag, "&lt;/e&gt;");
  detail::replace_all(out, kOpenTag, "&lt;e&gt;");
  return out;
}

inline std::string unescape_markup(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      const auto rest = s.substr(i);
      if (rest.substr(0, 5) == "&amp;") {
        out += '&';
        i += 5;
        continue;
      }
      if (rest.substr(0, 9) == "&lt;e&gt;") {
        out += kOpenTag;
        i += 9;
        continue;
      }
      if (rest.substr(0, 10) == "&lt;/e&gt;") {
        out += kCloseTag;
        i += 10;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

// Sorts and merges overlapping or touching spans.
inline SpanSet merge_spans(SpanSet spans) {
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  SpanSet out;
  for (const auto& s : spans) {
    if (!out.empty() && s.start <= out.back().end) {
      out.back().end = std::max(out.back().end, s.end);
    } else {
      out.push_back(s);
    }
  }
  return out;
}

// Perturbed-token spans covered by the log. A deletion marks the token that
// now follows the deletion point, or the last token when nothing follows.
inline SpanSet log_spans(const perturb::EditLog& log, std::size_t perturbed_tokens) {
  SpanSet spans;
  for (const auto& e : log.edits) {
    if (e.pert_begin > e.pert_end || e.pert_end > perturbed_tokens) {
      throw CorruptLogError("edit span outside the perturbed text");
    }
    if (e.pert_end > e.pert_begin) {
      spans.push_back({e.pert_begin, e.pert_end});
    } else if (perturbed_tokens > 0) {
      const std::size_t at = std::min(e.pert_begin, perturbed_tokens - 1);
      spans.push_back({at, at + 1});
    }
  }
  return merge_spans(std::move(spans));
}

// Wraps spans of `perturbed` in <e>...</e>.
inline std::string mark_token_spans(std::string_view perturbed, const SpanSet& spans) {
  const auto tokens = text::tokenize(perturbed);
  metrics::validate_spans(spans, tokens.size());
  std::string out;
  std::size_t pos = 0;
  for (const auto& s : spans) {
    const std::size_t b = tokens[s.start].begin;
    const std::size_t e = tokens[s.end - 1].end;
    out += escape_markup(perturbed.substr(pos, b - pos));
    out += kOpenTag;
    out += escape_markup(perturbed.substr(b, e - b));
    out += kCloseTag;
    pos = e;
  }
  out += escape_markup(perturbed.substr(pos));
  return out;
}

inline std::string mark_spans(std::string_view perturbed, const perturb::EditLog& log) {
  const auto split = perturb::split_text(perturbed);
  for (const auto& e : log.edits) {
    if (e.pert_begin > e.pert_end || e.pert_end > split.tokens.size() ||
        perturb::render_span(split.tokens, e.pert_begin, e.pert_end) != e.replacement) {
      throw CorruptLogError("edit log does not match the perturbed text");
    }
  }
  return mark_token_spans(perturbed, log_spans(log, split.tokens.size()));
}

struct ParsedMarkup {
  std::string text;
  SpanSet spans;
};

// Inverse of mark_token_spans. Throws ParseError on nested, unbalanced or
// mid-token tags.
inline ParsedMarkup parse_marked(std::string_view marked) {
  ParsedMarkup out;
  std::vector<std::pair<std::size_t, std::size_t>> regions;
  std::size_t seg = 0;
  bool open = false;
  std::size_t open_at = 0;
  const auto flush = [&](std::size_t upto) {
    out.text += unescape_markup(marked.substr(seg, upto - seg));
  };
  std::size_t i = 0;
  while (i < marked.size()) {
    if (marked.substr(i, kOpenTag.size()) == kOpenTag) {
      if (open) throw ParseError("nested <e> tag");
      flush(i);
      open = true;
      open_at = out.text.size();
      i += kOpenTag.size();
      seg = i;
    } else if (marked.substr(i, kCloseTag.size()) == kCloseTag) {
      if (!open) throw ParseError("</e> without <e>");
      flush(i);
      open = false;
      if (out.text.size() == open_at) throw ParseError("empty <e></e> span");
      regions.emplace_back(open_at, out.text.size());
      i += kCloseTag.size();
      seg = i;
    } else {
      ++i;
    }
  }
  if (open) throw ParseError("unclosed <e> tag");
  flush(marked.size());

  const auto tokens = text::tokenize(out.text);
  for (const auto& [b, e] : regions) {
    std::size_t first = tokens.size(), last = 0;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (tokens[k].begin == b) first = k;
      if (tokens[k].end == e) last = k + 1;
    }
    if (first == tokens.size() || last <= first) {
      throw ParseError("error span does not fall on token boundaries");
    }
    out.spans.push_back({first, last});
  }
  out.spans = merge_spans(std::move(out.spans));
  return out;
}

inline std::string strip_tags(std::string_view marked) { return parse_marked(marked).text; }

// ---------------------------------------------------------------------------
// Synthetic direct-assessment score

struct DAScoreInputs {
  std::string source;
  std::string original;   // T
  std::string perturbed;  // T~
  double ep = 0.0;        // error percentage from the edit log
  double cs = 0.0;        // base quality of (S, T)
  double tp = 100.0;      // 100 - TER(T~, T), clamped to [0, 100]
};

struct DaOptions {
  // Average Ep with Tp itself rather than with the TER (100 - Tp).
  bool literal_tp = false;
};

inline double da_degradation(double ep, double tp, const DaOptions& options = {}) {
  const double t = std::clamp(tp, 0.0, 100.0);
  return options.literal_tp ? (ep + t) / 2.0 : (ep + (100.0 - t)) / 2.0;
}

inline double synth_da_score(const DAScoreInputs& in, const DaOptions& options = {}) {
  return std::clamp(in.cs - da_degradation(in.ep, in.tp, options), corpus::kMinScore,
                    corpus::kMaxScore);
}

inline double tp_from_ter(double ter) { return 100.0 - std::clamp(ter, 0.0, 100.0); }

// ---------------------------------------------------------------------------
// Records

inline TaskRecord make_translation_record(const SentencePair& p) {
  TaskRecord r;
  r.task = corpus::make_task_string(kTranslationTask, format_tag(p.src_tag), format_tag(p.tgt_tag));
  r.domain = p.domain.empty() ? std::string(corpus::kDefaultDomain) : p.domain;
  r.input = {{format_tag(p.src_tag), p.src_text}};
  r.output = {{format_tag(p.tgt_tag), p.tgt_text}};
  return r;
}

// Result of a builder that perturbs text. `record` is empty when the
// perturbation could not change the text; `reason` says why.
struct Synthesized {
  std::optional<TaskRecord> record;
  std::string reason;
  std::string perturbed;
  perturb::EditLog log;
};

struct PerturbResources {
  const perturb::LexiconSet* lexicons = nullptr;
  const perturb::InflectionTrie* trie = nullptr;
};

namespace detail {

inline perturb::PerturbResult perturb_for(std::string_view text, perturb::PerturbationPlan plan,
                                          const LanguageTag& tag, const PerturbResources& res) {
  plan.language = tag;
  static const perturb::LexiconSet kEmpty;
  return perturb::apply_perturbations(text, plan, res.lexicons ? *res.lexicons : kEmpty, res.trie);
}

inline void check_band(double rate, double lo, double hi, std::string_view what) {
  if (!(rate >= lo && rate <= hi)) {
    throw ConfigError(std::string(what) + " rate " + std::to_string(rate) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

inline std::string domain_of(const SentencePair& p) {
  return p.domain.empty() ? std::string(corpus::kDefaultDomain) : p.domain;
}

inline constexpr std::string_view kSameTagReason = "source and target tags coincide";

// Two-sided records key both input fields by tag, so the tags must differ.
inline bool same_tags(const SentencePair& p) { return p.src_tag == p.tgt_tag; }

inline Synthesized skipped(perturb::PerturbResult pr) {
  Synthesized s;
  s.reason = pr.log.edits.empty() ? "no eligible position for the requested perturbations"
                                  : "perturbation left the text unchanged";
  s.perturbed = std::move(pr.text);
  s.log = std::move(pr.log);
  return s;
}

}  // namespace detail

inline Synthesized make_grammar_record(std::string_view text, const LanguageTag& tag,
                                       const perturb::PerturbationPlan& plan,
                                       const PerturbResources& res,
                                       std::string_view domain = corpus::kDefaultDomain) {
  auto pr = detail::perturb_for(text, plan, tag, res);
  if (pr.text == text) return detail::skipped(std::move(pr));
  const std::string t = format_tag(tag);
  TaskRecord r;
  r.task = corpus::make_task_string(kCorrectionTask, "Incorrect " + t, t);
  r.domain = std::string(domain.empty() ? corpus::kDefaultDomain : domain);
  r.input = {{"Incorrect " + t, pr.text}};
  r.output = {{"Corrected " + t, std::string(text)}};
  return Synthesized{std::move(r), "", std::move(pr.text), std::move(pr.log)};
}

inline Synthesized make_ape_record(const SentencePair& p, const perturb::PerturbationPlan& plan,
                                   const PerturbResources& res) {
  detail::check_band(plan.rate, kApeMinRate, kApeMaxRate, "post-editing");
  if (detail::same_tags(p)) return Synthesized{std::nullopt, std::string(detail::kSameTagReason), {}, {}};
  auto pr = detail::perturb_for(p.tgt_text, plan, p.tgt_tag, res);
  if (pr.text == p.tgt_text) return detail::skipped(std::move(pr));
  TaskRecord r;
  r.task = corpus::make_task_string(kPostEditTask, format_tag(p.src_tag), format_tag(p.tgt_tag));
  r.domain = detail::domain_of(p);
  r.input = {{format_tag(p.src_tag), p.src_text}, {format_tag(p.tgt_tag), pr.text}};
  r.output = {{post_edited_key(p.tgt_tag), p.tgt_text}};
  return Synthesized{std::move(r), "", std::move(pr.text), std::move(pr.log)};
}

inline Synthesized make_error_mark_record(const SentencePair& p,
                                          const perturb::PerturbationPlan& plan,
                                          const PerturbResources& res, bool with_correction = false) {
  detail::check_band(plan.rate, kApeMinRate, kApeMaxRate, "error-marking");
  if (detail::same_tags(p)) return Synthesized{std::nullopt, std::string(detail::kSameTagReason), {}, {}};
  auto pr = detail::perturb_for(p.tgt_text, plan, p.tgt_tag, res);
  if (pr.text == p.tgt_text) return detail::skipped(std::move(pr));
  TaskRecord r;
  r.task = corpus::make_task_string(with_correction ? kErrorMarkCorrectTask : kErrorMarkTask,
                                    format_tag(p.src_tag), format_tag(p.tgt_tag));
  r.domain = detail::domain_of(p);
  r.input = {{format_tag(p.src_tag), p.src_text}, {format_tag(p.tgt_tag), pr.text}};
  r.output = {{error_marked_key(p.tgt_tag), mark_spans(pr.text, pr.log)}};
  if (with_correction) r.output.emplace_back(post_edited_key(p.tgt_tag), p.tgt_text);
  return Synthesized{std::move(r), "", std::move(pr.text), std::move(pr.log)};
}

inline Synthesized make_error_mark_and_correct_record(const SentencePair& p,
                                                      const perturb::PerturbationPlan& plan,
                                                      const PerturbResources& res) {
  return make_error_mark_record(p, plan, res, true);
}

inline TaskRecord make_da_record(const SentencePair& p, std::string_view gold,
                                 std::string_view system, double score) {
  if (!(score >= corpus::kMinScore && score <= corpus::kMaxScore)) {
    throw ConfigError("direct assessment score " + std::to_string(score) + " outside [1, 100]");
  }
  const std::string t = format_tag(p.tgt_tag);
  TaskRecord r;
  r.task = corpus::make_task_string(kDirectAssessmentTask, format_tag(p.src_tag), t);
  r.domain = detail::domain_of(p);
  r.input = {{format_tag(p.src_tag), p.src_text},
             {"gold " + t, std::string(gold)},
             {"system " + t, std::string(system)}};
  r.output = {{std::string(kDaScoreKey), round_score(score)}};
  return r;
}

inline TaskRecord make_qe_record(const SentencePair& p, std::string_view system, double score) {
  if (!(score >= corpus::kMinScore && score <= corpus::kMaxScore)) {
    throw ConfigError("quality estimation score " + std::to_string(score) + " outside [1, 100]");
  }
  if (detail::same_tags(p)) throw ConfigError(std::string(detail::kSameTagReason));
  TaskRecord r;
  r.task = corpus::make_task_string(kQualityEstimationTask, format_tag(p.src_tag),
                                    format_tag(p.tgt_tag));
  r.domain = detail::domain_of(p);
  r.input = {{format_tag(p.src_tag), p.src_text}, {format_tag(p.tgt_tag), std::string(system)}};
  r.output = {{std::string(kQeScoreKey), round_score(score)}};
  return r;
}

// Pseudo direct-assessment record: perturbs the target, then degrades the
// base score `cs` of (source, target) by the error percentage and the TER
// between the perturbed and original target.
struct DaSynthesized {
  Synthesized result;
  DAScoreInputs inputs;
  double score = 0.0;
};

inline DaSynthesized synthesize_da(const SentencePair& p, const perturb::PerturbationPlan& plan,
                                   double cs, const PerturbResources& res,
                                   const DaOptions& options = {}) {
  detail::check_band(plan.rate, kDaMinRate, kDaMaxRate, "direct assessment");
  auto pr = detail::perturb_for(p.tgt_text, plan, p.tgt_tag, res);
  DaSynthesized out;
  out.inputs.source = p.src_text;
  out.inputs.original = p.tgt_text;
  out.inputs.perturbed = pr.text;
  out.inputs.ep = pr.log.error_percentage();
  out.inputs.cs = cs;
  out.inputs.tp = tp_from_ter(metrics::ter(pr.text, p.tgt_text));
  if (pr.text == p.tgt_text) {
    out.result = detail::skipped(std::move(pr));
    return out;
  }
  out.score = synth_da_score(out.inputs, options);
  out.result.record = make_da_record(p, p.tgt_text, pr.text, out.score);
  out.result.perturbed = std::move(pr.text);
  out.result.log = std::move(pr.log);
  return out;
}

// Plan for record `id` under a run-wide seed.
inline perturb::PerturbationPlan plan_for_record(perturb::PerturbationPlan base,
                                                 uint64_t global_seed, std::string_view id) {
  base.seed = record_seed(global_seed, id);
  return base;
}

}  // namespace corpusforge::synth

#endif  // CORPUSFORGE_SYNTHETIC_TASKS_HPP_
