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

// Subcommand implementations behind the corpusforge tool. run() validates
// the whole configuration before it opens any input, executes one
// subcommand, and returns the exit code with the run manifest.
//
// Exit codes: 0 success, 1 data error (unreadable input, backend failure,
// malformed lines above the error budget), 2 configuration error.

#ifndef CORPUSFORGE_PIPELINE_HPP_
#define CORPUSFORGE_PIPELINE_HPP_

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "corpusforge/backends.hpp"
#include "corpusforge/cleaning_filters.hpp"
#include "corpusforge/corpus_model.hpp"
#include "corpusforge/digest.hpp"
#include "corpusforge/error.hpp"
#include "corpusforge/http_backends.hpp"
#include "corpusforge/inflection_trie.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/lexicon.hpp"
#include "corpusforge/metrics.hpp"
#include "corpusforge/orchestrator.hpp"
#include "corpusforge/parallel.hpp"
#include "corpusforge/perturbation.hpp"
#include "corpusforge/run_config.hpp"
#include "corpusforge/seeding.hpp"
#include "corpusforge/synthetic_tasks.hpp"
#include "json.hpp"

namespace corpusforge::cli {

inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr std::string_view kCommands[] = {"clean", "perturb", "synth", "score",
                                                 "align", "pivot",   "backtranslate", "stats"};

using corpus::Json;
using corpus::SentencePair;
using lang::LanguageTag;

struct RunOutcome {
  int exit_code = 0;
  Json manifest;
};

namespace detail {

// Line sink that hashes what it writes.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (path_ != "-") {
      file_.open(path_, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error("cannot write '" + path_ + "'");
    }
  }

  void line(std::string_view s) {
    std::ostream& out = path_ == "-" ? std::cout : file_;
    out << s << '\n';
    if (!out) throw Error("write to '" + path_ + "' failed");
    hash_.update(s);
    hash_.update("\n");
    ++lines_;
  }

  Json finish() {
    std::ostream& out = path_ == "-" ? std::cout : file_;
    out.flush();
    Json j;
    j["path"] = path_;
    j["sha256"] = hash_.hex();
    j["lines"] = lines_;
    return j;
  }

 private:
  std::string path_;
  std::ofstream file_;
  Sha256 hash_;
  std::size_t lines_ = 0;
};

// Input file or stdin. Stdin is buffered so it can be hashed.
class Source {
 public:
  explicit Source(const std::string& path) : path_(path) {
    if (path == "-") {
      std::ostringstream buf;
      buf << std::cin.rdbuf();
      const std::string data = buf.str();
      digest_ = sha256_hex(data);
      stream_ = std::make_unique<std::istringstream>(data);
    } else {
      if (!std::filesystem::is_regular_file(path)) throw Error("cannot read input '" + path + "'");
      digest_ = sha256_file(path);
      auto f = std::make_unique<std::ifstream>(path, std::ios::binary);
      if (!*f) throw Error("cannot read input '" + path + "'");
      stream_ = std::move(f);
    }
  }

  std::istream& stream() { return *stream_; }
  const std::string& digest() const { return digest_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string digest_;
  std::unique_ptr<std::istream> stream_;
};

struct MonoLine {
  std::string id;
  std::string text;
};

// One text per line; blank lines are skipped, invalid UTF-8 is an error line.
class MonoReader {
 public:
  explicit MonoReader(std::istream& in) : in_(in) {}

  std::optional<std::variant<MonoLine, corpus::LineError>> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (text::trim(line).empty()) continue;
      if (const auto bad = text::find_invalid_utf8(line)) {
        return corpus::LineError{line_no_, *bad, "invalid UTF-8"};
      }
      return MonoLine{std::to_string(line_no_), text::nfc(line)};
    }
    return std::nullopt;
  }

  std::size_t lines_read() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

inline std::vector<std::string> read_lines_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::find_invalid_utf8(line)) throw Error("invalid UTF-8 in '" + path + "'");
    out.push_back(text::nfc(line));
  }
  return out;
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Everything derived from the configuration before touching data.
struct Resolved {
  lang::Registry registry;
  std::optional<LanguageTag> src_tag;
  std::optional<LanguageTag> tgt_tag;
  std::optional<LanguageTag> pivot_tag;
  std::optional<LanguageTag> target_tag;
  std::optional<LanguageTag> into_tag;
  corpus::Format format = corpus::Format::kTsv;
  clean::FilterPolicy policy;
  synth::TaskKind task = synth::TaskKind::kGec;
  double rate_min = perturb::kDefaultRate;
  double rate_max = perturb::kDefaultRate;
  std::vector<perturb::Kind> kinds;  // empty: every available kind
  uint64_t seed = 0;
  std::size_t jobs = 1;
  double error_budget = 0.001;
  augment::HttpOptions http;
  augment::BatchOptions batches;
};

inline std::optional<LanguageTag> tag_key(const RunConfig& cfg, std::string_view key,
                                          const lang::Registry& reg) {
  const auto& v = cfg.str(key);
  if (v.empty()) return std::nullopt;
  try {
    return lang::parse_tag(v, reg);
  } catch (const Error& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.what());
  }
}

inline LanguageTag require_tag(const std::optional<LanguageTag>& t, std::string_view key,
                               std::string_view command) {
  if (!t) throw ConfigError(std::string(command) + " needs --" + std::string(key));
  return *t;
}

inline Resolved resolve(const RunConfig& cfg) {
  Resolved r;
  bool known = false;
  for (auto c : kCommands) known = known || c == cfg.command;
  if (!known) throw ConfigError("unknown command '" + cfg.command + "'");

  r.registry = cfg.str("registry").empty() ? lang::Registry::bundled()
                                           : lang::Registry::from_file(cfg.str("registry"));
  r.src_tag = tag_key(cfg, "src-tag", r.registry);
  r.tgt_tag = tag_key(cfg, "tgt-tag", r.registry);
  r.pivot_tag = tag_key(cfg, "pivot-tag", r.registry);
  r.target_tag = tag_key(cfg, "target-tag", r.registry);
  r.into_tag = tag_key(cfg, "into-tag", r.registry);

  const auto& fmt = cfg.str("format");
  if (fmt == "auto") {
    const auto ext = std::filesystem::path(cfg.str("input")).extension().string();
    r.format = (ext == ".jsonl" || ext == ".json") ? corpus::Format::kJsonl : corpus::Format::kTsv;
  } else if (const auto f = corpus::format_from_name(fmt)) {
    r.format = *f;
  } else {
    throw ConfigError("format must be tsv, jsonl or auto");
  }

  r.seed = cfg.u64("seed");
  r.jobs = cfg.count("jobs", 1);
  r.error_budget = cfg.real("error-budget");
  if (!(r.error_budget >= 0.0 && r.error_budget <= 1.0)) {
    throw ConfigError("error-budget must lie in [0, 1]");
  }

  r.policy.max_word_delta = static_cast<int>(cfg.integer("max-word-delta"));
  r.policy.max_char_delta = cfg.optional_real("max-char-delta");
  r.policy.majority_fraction = cfg.real("majority");
  r.policy.qe_margin = cfg.real("qe-margin");
  r.policy.chunk_size = cfg.count("chunk-size", 1);
  r.policy.use_attached_scores = cfg.flag("use-attached-scores");
  r.policy.stages.clear();
  for (const auto& s : cfg.list("stages")) {
    const auto st = clean::stage_from_name(s);
    if (!st) throw ConfigError("unknown stage '" + s + "'");
    r.policy.stages.insert(*st);
  }
  r.policy.validate();

  const auto task = synth::task_kind_from_name(cfg.str("task"));
  if (!task) throw ConfigError("unknown task '" + cfg.str("task") + "'");
  r.task = *task;
  for (const auto& k : cfg.list("kinds")) {
    const auto kind = perturb::kind_from_name(k);
    if (!kind) throw ConfigError("unknown perturbation kind '" + k + "'");
    r.kinds.push_back(*kind);
  }

  double lo = perturb::kMinRate, hi = perturb::kMaxRate;
  double dlo = perturb::kDefaultRate, dhi = perturb::kDefaultRate;
  if (cfg.command == "synth") {
    if (r.task == synth::TaskKind::kApe || r.task == synth::TaskKind::kErrMark ||
        r.task == synth::TaskKind::kErrMarkCorrect) {
      lo = dlo = synth::kApeMinRate;
      hi = dhi = synth::kApeMaxRate;
    } else if (r.task == synth::TaskKind::kDa) {
      lo = dlo = synth::kDaMinRate;
      hi = dhi = synth::kDaMaxRate;
    }
  }
  r.rate_min = cfg.optional_real("rate-min").value_or(dlo);
  r.rate_max = cfg.optional_real("rate-max").value_or(dhi);
  if (!(r.rate_min >= lo && r.rate_max <= hi && r.rate_min <= r.rate_max)) {
    throw ConfigError("rate band [" + std::to_string(r.rate_min) + ", " +
                      std::to_string(r.rate_max) + "] outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] or inverted");
  }

  r.http.timeout = std::chrono::milliseconds(cfg.count("timeout-ms", 1));
  r.http.max_attempts = static_cast<int>(cfg.count("retries", 1));
  r.batches.batch_size = cfg.count("batch-size", 1);
  r.batches.in_flight = cfg.count("in-flight", 1);
  cfg.count("min-stem-len", 2);
  cfg.count("band", 0);
  cfg.count("rounds", 1);
  cfg.real("threshold");
  cfg.flag("passages");
  cfg.flag("da-literal-tp");
  if (!cfg.str("translator-url").empty()) augment::parse_endpoint(cfg.str("translator-url"));
  if (!cfg.str("scorer-url").empty()) augment::parse_endpoint(cfg.str("scorer-url"));
  if (cfg.str("translator-url").empty() && cfg.str("translator") != "echo") {
    throw ConfigError("unknown translator stub '" + cfg.str("translator") + "'");
  }
  if (cfg.str("scorer-url").empty() && cfg.str("scorer") != "length-ratio") {
    throw ConfigError("unknown scorer stub '" + cfg.str("scorer") + "'");
  }

  // Per-command requirements.
  const auto& c = cfg.command;
  const bool pairs_in = c == "clean" || c == "pivot" || c == "stats" ||
                        (c == "synth" && r.task != synth::TaskKind::kGec);
  if (pairs_in && r.format == corpus::Format::kTsv && c != "pivot") {
    require_tag(r.src_tag, "src-tag", c);
    require_tag(r.tgt_tag, "tgt-tag", c);
  }
  const bool two_sided = r.task == synth::TaskKind::kApe || r.task == synth::TaskKind::kErrMark ||
                         r.task == synth::TaskKind::kErrMarkCorrect || r.task == synth::TaskKind::kQe;
  if (c == "synth" && two_sided && r.src_tag && r.tgt_tag && *r.src_tag == *r.tgt_tag) {
    throw ConfigError("synth " + std::string(synth::task_kind_name(r.task)) +
                      " needs different --src-tag and --tgt-tag");
  }
  if (c == "perturb" || (c == "synth" && r.task == synth::TaskKind::kGec)) {
    require_tag(r.src_tag, "src-tag", c);
  }
  if (c == "align") {
    require_tag(r.src_tag, "src-tag", c);
    require_tag(r.tgt_tag, "tgt-tag", c);
    if (cfg.str("src-doc").empty() || cfg.str("tgt-doc").empty()) {
      throw ConfigError("align needs --src-doc and --tgt-doc");
    }
  }
  if (c == "pivot") {
    require_tag(r.pivot_tag, "pivot-tag", c);
    require_tag(r.target_tag, "target-tag", c);
    if (r.format == corpus::Format::kTsv) {
      require_tag(r.src_tag, "src-tag", c);
      require_tag(r.tgt_tag, "tgt-tag", c);
    }
  }
  if (c == "backtranslate") {
    require_tag(r.into_tag, "into-tag", c);
    if (!cfg.flag("passages")) require_tag(r.src_tag, "src-tag", c);
  }
  if (c == "score" && cfg.str("hypotheses").empty() != cfg.str("references").empty()) {
    throw ConfigError("score needs both --hypotheses and --references, or neither");
  }
  return r;
}

inline std::shared_ptr<augment::TranslatorClient> make_translator(const RunConfig& cfg,
                                                                  const Resolved& r) {
  if (!cfg.str("translator-url").empty()) {
    return std::make_shared<augment::HttpTranslator>(cfg.str("translator-url"), r.http);
  }
  return std::make_shared<augment::EchoTranslator>();
}

inline std::shared_ptr<augment::ScorerClient> make_scorer(const RunConfig& cfg, const Resolved& r) {
  if (!cfg.str("scorer-url").empty()) {
    return std::make_shared<augment::HttpScorer>(cfg.str("scorer-url"), r.http);
  }
  return std::make_shared<augment::LengthRatioScorer>();
}

// Perturbation rate for one record: fixed when the band is a point,
// otherwise drawn uniformly from the band with the record's own seed.
inline double record_rate(const Resolved& r, std::string_view id) {
  if (r.rate_min == r.rate_max) return r.rate_min;
  Rng rng(record_seed(r.seed, std::string(id) + "/rate"));
  return r.rate_min + (r.rate_max - r.rate_min) * rng.unit();
}

class Runner {
 public:
  Runner(const RunConfig& cfg, Resolved r, std::ostream& log)
      : cfg_(cfg), r_(std::move(r)), log_(log) {}

  void execute() {
    const auto& c = cfg_.command;
    if (c == "clean") return clean_cmd();
    if (c == "perturb") return perturb_cmd();
    if (c == "synth") return synth_cmd();
    if (c == "score") return score_cmd();
    if (c == "align") return align_cmd();
    if (c == "pivot") return pivot_cmd();
    if (c == "backtranslate") return backtranslate_cmd();
    if (c == "stats") return stats_cmd();
  }

  Json inputs = Json::object();
  Json outputs = Json::object();
  Json stages = Json::object();
  Json timings = Json::object();
  std::size_t lines_read = 0;
  std::size_t malformed = 0;

 private:
  void note_error(const corpus::LineError& e) {
    ++malformed;
    if (malformed <= 20) {
      log_ << "line " << e.line << " (byte " << e.byte_offset << "): " << e.message << '\n';
    } else if (malformed == 21) {
      log_ << "further malformed lines are counted but not shown\n";
    }
  }

  corpus::ReaderOptions reader_options() const {
    corpus::ReaderOptions o;
    if (r_.src_tag) o.src_tag = *r_.src_tag;
    if (r_.tgt_tag) o.tgt_tag = *r_.tgt_tag;
    o.domain = cfg_.str("domain");
    o.registry = &r_.registry;
    return o;
  }

  detail::Source open_input() {
    detail::Source src(cfg_.str("input"));
    inputs[src.path()] = src.digest();
    return src;
  }

  // Streams pairs in chunks of chunk-size; fn sees each chunk in order.
  template <typename Fn>
  void for_pair_chunks(std::istream& in, Fn fn) {
    corpus::PairReader reader(in, r_.format, reader_options());
    std::vector<SentencePair> chunk;
    while (auto item = reader.next()) {
      if (auto* e = std::get_if<corpus::LineError>(&*item)) {
        note_error(*e);
        continue;
      }
      chunk.push_back(std::move(std::get<SentencePair>(*item)));
      if (chunk.size() >= r_.policy.chunk_size) {
        fn(chunk);
        chunk.clear();
      }
    }
    if (!chunk.empty()) fn(chunk);
    lines_read = reader.lines_read();
  }

  template <typename Fn>
  void for_mono_chunks(std::istream& in, Fn fn) {
    detail::MonoReader reader(in);
    std::vector<detail::MonoLine> chunk;
    while (auto item = reader.next()) {
      if (auto* e = std::get_if<corpus::LineError>(&*item)) {
        note_error(*e);
        continue;
      }
      chunk.push_back(std::move(std::get<detail::MonoLine>(*item)));
      if (chunk.size() >= r_.policy.chunk_size) {
        fn(chunk);
        chunk.clear();
      }
    }
    if (!chunk.empty()) fn(chunk);
    lines_read = reader.lines_read();
  }

  static std::string pair_line(const SentencePair& p, corpus::Format f) {
    std::ostringstream os;
    corpus::write_pair(os, p, f);
    std::string s = os.str();
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
  }

  // ---- clean ---------------------------------------------------------------

  void clean_cmd() {
    auto src = open_input();
    detail::Sink out(cfg_.str("output"));
    std::optional<detail::Sink> verdicts;
    if (!cfg_.str("verdicts").empty()) verdicts.emplace(cfg_.str("verdicts"));
    clean::ScriptBlockClassifier classifier(r_.registry);
    auto scorer = make_scorer(cfg_, r_);
    clean::CleanPipeline pipeline(r_.policy, classifier, scorer.get(), r_.jobs);
    corpus::PairReader reader(src.stream(), r_.format, reader_options());
    const auto t0 = std::chrono::steady_clock::now();
    const auto stats = pipeline.run(
        [&]() -> std::optional<SentencePair> {
          while (auto item = reader.next()) {
            if (auto* e = std::get_if<corpus::LineError>(&*item)) {
              note_error(*e);
              continue;
            }
            return std::get<SentencePair>(std::move(*item));
          }
          return std::nullopt;
        },
        [&](const SentencePair& p) { out.line(pair_line(p, r_.format)); },
        [&](const clean::FilterVerdict& v) {
          if (verdicts) verdicts->line(v.to_json().dump());
        });
    timings["clean"] = detail::ms_since(t0);
    lines_read = reader.lines_read();
    stages["clean"] = stats.to_json();
    Json th = Json::array();
    for (const auto& t : pipeline.thresholds()) {
      th.push_back({{"chunk", t.chunk},
                    {"src_tag", t.src_tag},
                    {"tgt_tag", t.tgt_tag},
                    {"mean", t.qe.mean},
                    {"threshold", t.qe.threshold},
                    {"scored", t.qe.scored}});
    }
    stages["qe_thresholds"] = th;
    outputs["kept"] = out.finish();
    if (verdicts) outputs["verdicts"] = verdicts->finish();
  }

  // ---- perturb / synth -----------------------------------------------------

  struct PerturbSetup {
    perturb::LexiconSet lexicons;
    std::optional<perturb::InflectionTrie> trie;
    std::vector<perturb::Kind> kinds;
  };

  PerturbSetup perturb_setup(const LanguageTag& tag) const {
    PerturbSetup s;
    if (!cfg_.str("lexicons").empty()) {
      if (!std::filesystem::is_directory(cfg_.str("lexicons"))) {
        throw ConfigError("lexicon root '" + cfg_.str("lexicons") + "' is not a directory");
      }
      s.lexicons = perturb::LexiconSet::load(cfg_.str("lexicons"), {tag});
    }
    if (const auto* lex = s.lexicons.find(tag); lex && !lex->vocabulary.empty()) {
      s.trie = perturb::InflectionTrie::build(lex->vocabulary, cfg_.count("min-stem-len", 2));
    }
    const auto* trie = s.trie ? &*s.trie : nullptr;
    s.kinds = r_.kinds.empty() ? perturb::available_kinds(tag, s.lexicons, trie) : r_.kinds;
    if (s.kinds.empty()) throw ConfigError("no perturbation kind is usable for " + tag.code_script());
    perturb::check_resources({s.kinds, r_.rate_min, 0, tag}, s.lexicons, trie);
    return s;
  }

  void perturb_cmd() {
    const LanguageTag tag = *r_.src_tag;
    const auto setup = perturb_setup(tag);
    auto src = open_input();
    detail::Sink out(cfg_.str("output"));
    std::size_t total = 0, shortfalls = 0, unchanged = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for_mono_chunks(src.stream(), [&](const std::vector<detail::MonoLine>& chunk) {
      const auto results = parallel_map(chunk, r_.jobs, [&](const detail::MonoLine& m) {
        perturb::PerturbationPlan plan{setup.kinds, record_rate(r_, m.id),
                                       record_seed(r_.seed, m.id), tag};
        return perturb::apply_perturbations(m.text, plan, setup.lexicons,
                                            setup.trie ? &*setup.trie : nullptr);
      });
      for (std::size_t i = 0; i < chunk.size(); ++i) {
        const auto& res = results[i];
        ++total;
        if (res.log.shortfall > 0) ++shortfalls;
        if (res.text == chunk[i].text) ++unchanged;
        Json j;
        j["id"] = chunk[i].id;
        j["original"] = chunk[i].text;
        j["perturbed"] = res.text;
        j["log"] = res.log.to_json();
        out.line(j.dump());
      }
    });
    timings["perturb"] = detail::ms_since(t0);
    Json kinds = Json::array();
    for (auto k : setup.kinds) kinds.push_back(perturb::kind_name(k));
    stages["perturb"] = {{"total", total},
                         {"with_shortfall", shortfalls},
                         {"unchanged", unchanged},
                         {"kinds", kinds}};
    outputs["perturbed"] = out.finish();
  }

  struct SynthStats {
    std::size_t total = 0;
    std::size_t emitted = 0;
    std::map<std::string, std::size_t> skipped;
    Json to_json() const {
      Json j;
      j["total"] = total;
      j["emitted"] = emitted;
      j["skipped"] = Json::object();
      for (const auto& [k, v] : skipped) j["skipped"][k] = v;
      return j;
    }
  };

  // Scores (src, tgt) of each pair, one backend call per language pair.
  std::vector<double> base_scores(const std::vector<SentencePair>& chunk,
                                  augment::ScorerClient& scorer) const {
    std::vector<double> out(chunk.size(), 0.0);
    std::map<std::pair<LanguageTag, LanguageTag>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      if (chunk[i].score && r_.policy.use_attached_scores) {
        out[i] = *chunk[i].score;
      } else {
        groups[{chunk[i].src_tag, chunk[i].tgt_tag}].push_back(i);
      }
    }
    for (const auto& [tags, idx] : groups) {
      std::vector<augment::TextPair> pairs;
      for (auto i : idx) pairs.emplace_back(chunk[i].src_text, chunk[i].tgt_text);
      const auto scores = augment::detail::score_batched(scorer, pairs, tags.first, tags.second,
                                                         r_.batches);
      for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = scores[k];
    }
    return out;
  }

  void synth_cmd() {
    auto src = open_input();
    detail::Sink out(cfg_.str("output"));
    SynthStats st;
    const auto t0 = std::chrono::steady_clock::now();
    const auto emit = [&](const synth::Synthesized& s) {
      ++st.total;
      const auto invalid = s.record ? corpus::check_record(*s.record) : std::nullopt;
      if (s.record && !invalid) {
        out.line(corpus::record_to_json(*s.record).dump());
        ++st.emitted;
      } else if (invalid) {
        ++st.skipped[*invalid];
      } else {
        ++st.skipped[s.reason];
      }
    };

    if (r_.task == synth::TaskKind::kGec) {
      const LanguageTag tag = *r_.src_tag;
      const auto setup = perturb_setup(tag);
      const synth::PerturbResources res{&setup.lexicons, setup.trie ? &*setup.trie : nullptr};
      for_mono_chunks(src.stream(), [&](const std::vector<detail::MonoLine>& chunk) {
        const auto results = parallel_map(chunk, r_.jobs, [&](const detail::MonoLine& m) {
          perturb::PerturbationPlan plan{setup.kinds, record_rate(r_, m.id),
                                         record_seed(r_.seed, m.id), tag};
          return synth::make_grammar_record(m.text, tag, plan, res, cfg_.str("domain"));
        });
        for (const auto& s : results) emit(s);
      });
    } else if (r_.task == synth::TaskKind::kTranslation) {
      for_pair_chunks(src.stream(), [&](const std::vector<SentencePair>& chunk) {
        for (const auto& p : chunk) {
          synth::Synthesized s;
          s.record = synth::make_translation_record(p);
          emit(s);
        }
      });
    } else if (r_.task == synth::TaskKind::kQe) {
      auto scorer = make_scorer(cfg_, r_);
      for_pair_chunks(src.stream(), [&](const std::vector<SentencePair>& chunk) {
        const auto scores = base_scores(chunk, *scorer);
        for (std::size_t i = 0; i < chunk.size(); ++i) {
          synth::Synthesized s;
          if (chunk[i].src_tag == chunk[i].tgt_tag) {
            s.reason = synth::detail::kSameTagReason;
            emit(s);
            continue;
          }
          s.record = synth::make_qe_record(
              chunk[i], chunk[i].tgt_text,
              std::clamp(scores[i], corpus::kMinScore, corpus::kMaxScore));
          emit(s);
        }
      });
    } else {
      // Perturbing tasks on pairs; resources are loaded per target language.
      std::map<LanguageTag, PerturbSetup> setups;
      const auto setup_for = [&](const LanguageTag& t) -> const PerturbSetup& {
        auto it = setups.find(t);
        if (it == setups.end()) it = setups.emplace(t, perturb_setup(t)).first;
        return it->second;
      };
      if (r_.tgt_tag) setup_for(*r_.tgt_tag);
      auto scorer = r_.task == synth::TaskKind::kDa ? make_scorer(cfg_, r_) : nullptr;
      synth::DaOptions da_opt;
      da_opt.literal_tp = cfg_.flag("da-literal-tp");
      for_pair_chunks(src.stream(), [&](const std::vector<SentencePair>& chunk) {
        for (const auto& p : chunk) setup_for(p.tgt_tag);
        std::vector<double> cs;
        if (scorer) cs = base_scores(chunk, *scorer);
        std::vector<std::size_t> idx(chunk.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        const auto results = parallel_map(idx, r_.jobs, [&](std::size_t i) {
          const auto& p = chunk[i];
          const auto& setup = setups.at(p.tgt_tag);
          const synth::PerturbResources res{&setup.lexicons, setup.trie ? &*setup.trie : nullptr};
          perturb::PerturbationPlan plan{setup.kinds, record_rate(r_, p.id),
                                         record_seed(r_.seed, p.id), p.tgt_tag};
          switch (r_.task) {
            case synth::TaskKind::kApe: return synth::make_ape_record(p, plan, res);
            case synth::TaskKind::kErrMark: return synth::make_error_mark_record(p, plan, res);
            case synth::TaskKind::kErrMarkCorrect:
              return synth::make_error_mark_and_correct_record(p, plan, res);
            default: return synth::synthesize_da(p, plan, cs[i], res, da_opt).result;
          }
        });
        for (const auto& s : results) emit(s);
      });
    }
    timings["synth"] = detail::ms_since(t0);
    stages["synth"] = st.to_json();
    stages["synth"]["task"] = synth::task_kind_name(r_.task);
    outputs["records"] = out.finish();
  }

  // ---- score ---------------------------------------------------------------

  void score_cmd() {
    std::vector<std::string> hyps, refs;
    std::vector<std::optional<std::pair<std::string, std::string>>> marked;
    std::vector<double> pred_scores, gold_scores;
    if (!cfg_.str("hypotheses").empty()) {
      hyps = detail::read_lines_file(cfg_.str("hypotheses"));
      refs = detail::read_lines_file(cfg_.str("references"));
      inputs[cfg_.str("hypotheses")] = sha256_file(cfg_.str("hypotheses"));
      inputs[cfg_.str("references")] = sha256_file(cfg_.str("references"));
      if (hyps.size() != refs.size()) {
        throw Error("hypotheses and references differ in line count");
      }
      lines_read = hyps.size();
    } else {
      auto src = open_input();
      std::string line;
      std::size_t n = 0;
      while (std::getline(src.stream(), line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
          const Json j = Json::parse(line);
          hyps.push_back(text::nfc(j.at("hypothesis").get<std::string>()));
          refs.push_back(text::nfc(j.at("reference").get<std::string>()));
          if (j.contains("predicted_marked") && j.contains("gold_marked")) {
            marked.emplace_back(std::make_pair(j["predicted_marked"].get<std::string>(),
                                               j["gold_marked"].get<std::string>()));
          } else {
            marked.emplace_back(std::nullopt);
          }
          if (j.contains("predicted_score") && j.contains("gold_score")) {
            pred_scores.push_back(j["predicted_score"].get<double>());
            gold_scores.push_back(j["gold_score"].get<double>());
          }
        } catch (const std::exception& e) {
          note_error({n, 0, e.what()});
        }
      }
      lines_read = n;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Json report;
    Json segs = Json::array();
    std::size_t ter_edits = 0, ter_len = 0;
    double chrf_sum = 0.0, f1_sum = 0.0;
    std::size_t f1_n = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      Json s;
      s["bleu"] = metrics::sentence_bleu(hyps[i], refs[i]);
      const double c = metrics::chrf(hyps[i], refs[i]);
      s["chrf"] = c;
      chrf_sum += c;
      if (!metrics::tokens_of(refs[i]).empty()) {
        const auto ts = metrics::ter_stats(hyps[i], refs[i]);
        s["ter"] = ts.score();
        ter_edits += ts.edits;
        ter_len += ts.ref_length;
      }
      if (i < marked.size() && marked[i]) {
        const auto pred = synth::parse_marked(marked[i]->first);
        const auto gold = synth::parse_marked(marked[i]->second);
        if (pred.text != gold.text) throw Error("marked texts differ on segment " + std::to_string(i + 1));
        const double f1 = metrics::span_f1(pred.spans, gold.spans, text::tokenize(pred.text).size());
        s["span_f1"] = f1;
        f1_sum += f1;
        ++f1_n;
      }
      segs.push_back(std::move(s));
    }
    Json corpus_j;
    if (!hyps.empty()) {
      corpus_j["segments"] = hyps.size();
      corpus_j["bleu"] = metrics::bleu(hyps, refs);
      corpus_j["chrf"] = chrf_sum / static_cast<double>(hyps.size());
      if (ter_len > 0) corpus_j["ter"] = 100.0 * static_cast<double>(ter_edits) / static_cast<double>(ter_len);
    } else {
      corpus_j["segments"] = 0;
    }
    if (f1_n > 0) corpus_j["span_f1"] = f1_sum / static_cast<double>(f1_n);
    if (pred_scores.size() >= 2) {
      const auto rho = metrics::spearman(pred_scores, gold_scores);
      corpus_j["spearman"] = rho ? Json(*rho) : Json(nullptr);
    }
    report["corpus"] = corpus_j;
    report["segments"] = segs;
    timings["score"] = detail::ms_since(t0);
    detail::Sink out(cfg_.str("output"));
    out.line(report.dump());
    stages["score"] = {{"segments", hyps.size()}};
    outputs["report"] = out.finish();
  }

  // ---- align / pivot / backtranslate ----------------------------------------

  void align_cmd() {
    const auto src_lines = detail::read_lines_file(cfg_.str("src-doc"));
    const auto tgt_lines = detail::read_lines_file(cfg_.str("tgt-doc"));
    inputs[cfg_.str("src-doc")] = sha256_file(cfg_.str("src-doc"));
    inputs[cfg_.str("tgt-doc")] = sha256_file(cfg_.str("tgt-doc"));
    lines_read = src_lines.size() + tgt_lines.size();
    auto scorer = make_scorer(cfg_, r_);
    augment::AlignOptions opt;
    opt.band = cfg_.count("band");
    opt.threshold = cfg_.real("threshold");
    opt.batches = r_.batches;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<augment::AlignedPair> matches;
    if (!src_lines.empty() && !tgt_lines.empty()) {
      matches = augment::align_sentences(src_lines, tgt_lines, *scorer, *r_.src_tag, *r_.tgt_tag, opt);
    }
    timings["align"] = detail::ms_since(t0);
    detail::Sink out(cfg_.str("output"));
    for (const auto& m : matches) {
      Json j;
      j["i"] = m.i;
      j["j"] = m.j;
      j["score"] = m.score;
      j["src"] = src_lines[m.i];
      j["tgt"] = tgt_lines[m.j];
      out.line(j.dump());
    }
    stages["align"] = {{"src_sentences", src_lines.size()},
                       {"tgt_sentences", tgt_lines.size()},
                       {"aligned", matches.size()},
                       {"band", opt.band},
                       {"threshold", opt.threshold}};
    outputs["alignments"] = out.finish();
  }

  void pivot_cmd() {
    auto src = open_input();
    std::vector<SentencePair> pairs;
    for_pair_chunks(src.stream(), [&](const std::vector<SentencePair>& chunk) {
      pairs.insert(pairs.end(), chunk.begin(), chunk.end());
    });
    auto translator = make_translator(cfg_, r_);
    auto scorer = make_scorer(cfg_, r_);
    augment::PivotOptions opt;
    opt.batches = r_.batches;
    opt.checkpoint = cfg_.str("checkpoint");
    const auto t0 = std::chrono::steady_clock::now();
    const auto res =
        augment::pivot_translate(pairs, *r_.pivot_tag, *r_.target_tag, *translator, *scorer, opt);
    timings["pivot"] = detail::ms_since(t0);
    detail::Sink out(cfg_.str("output"));
    for (const auto& p : res.pairs) out.line(pair_line(p, corpus::Format::kJsonl));
    stages["pivot"] = {{"input_pairs", pairs.size()},
                       {"kept", res.pairs.size()},
                       {"resumed_batches", res.resumed_batches},
                       {"thresholds", augment::thresholds_to_json(res.thresholds)}};
    outputs["pairs"] = out.finish();
  }

  static Json audit_json(const augment::BTState& st) {
    Json rounds = Json::array();
    for (const auto& r : st.audit) {
      Json j;
      j["round"] = r.round;
      j["failed"] = r.failed;
      if (r.failed) {
        j["error"] = r.error;
      } else {
        double sum = 0;
        for (double s : r.scores) sum += s;
        j["mean_score"] = r.scores.empty() ? 0.0 : sum / static_cast<double>(r.scores.size());
      }
      rounds.push_back(std::move(j));
    }
    std::map<std::size_t, std::size_t> wins;
    for (const auto& b : st.best_round) {
      if (b) ++wins[*b];
    }
    Json w = Json::object();
    for (const auto& [round, n] : wins) w[std::to_string(round)] = n;
    return {{"rounds", rounds}, {"selected_per_round", w}};
  }

  void backtranslate_cmd() {
    auto src = open_input();
    auto translator = make_translator(cfg_, r_);
    auto scorer = make_scorer(cfg_, r_);
    augment::BtOptions opt;
    opt.rounds = cfg_.count("rounds", 1);
    opt.batches = r_.batches;
    const auto factory = augment::fixed_translator(translator);
    detail::Sink out(cfg_.str("output"));
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg_.flag("passages")) {
      std::vector<corpus::Passage> passages;
      std::string line;
      std::size_t n = 0;
      while (std::getline(src.stream(), line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
          const Json j = Json::parse(line);
          corpus::Passage p;
          p.id = j.contains("id") ? (j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump())
                                  : std::to_string(n);
          if (j.contains("tag")) {
            p.tag = lang::parse_tag(j["tag"].get<std::string>(), r_.registry);
          } else if (r_.src_tag) {
            p.tag = *r_.src_tag;
          } else {
            throw ParseError("passage without \"tag\" and no --src-tag");
          }
          for (const auto& s : j.at("sentences")) p.sentences.push_back(text::nfc(s.get<std::string>()));
          if (j.contains("domain")) p.domain = j["domain"].get<std::string>();
          passages.push_back(std::move(p));
        } catch (const std::exception& e) {
          note_error({n, 0, e.what()});
        }
      }
      lines_read = n;
      if (!passages.empty()) {
        const auto res = augment::paragraph_back_translate(passages, *r_.into_tag, factory, *scorer, opt);
        const std::set<std::string> incomplete(res.incomplete.begin(), res.incomplete.end());
        for (std::size_t i = 0; i < res.passages.size(); ++i) {
          const auto& p = res.passages[i];
          if (incomplete.count(p.id)) continue;
          Json j;
          j["id"] = p.id;
          j["tag"] = lang::format_tag(p.tag);
          j["source_tag"] = lang::format_tag(passages[i].tag);
          j["domain"] = p.domain;
          j["sentences"] = p.sentences;
          j["original"] = passages[i].sentences;
          out.line(j.dump());
        }
        Json audits = Json::array();
        for (const auto& st : res.states) audits.push_back(audit_json(st));
        stages["backtranslate"] = {{"passages", passages.size()},
                                   {"incomplete", res.incomplete.size()},
                                   {"audit", audits}};
      } else {
        stages["backtranslate"] = {{"passages", 0}};
      }
    } else {
      std::vector<std::string> mono;
      std::vector<std::string> ids;
      for_mono_chunks(src.stream(), [&](const std::vector<detail::MonoLine>& chunk) {
        for (const auto& m : chunk) {
          ids.push_back(m.id);
          mono.push_back(m.text);
        }
      });
      const auto res =
          augment::iterative_back_translate(mono, *r_.src_tag, *r_.into_tag, factory, *scorer, opt);
      for (auto p : res.pairs) {
        p.id = ids[std::stoul(p.id) - 1];
        out.line(pair_line(p, corpus::Format::kJsonl));
      }
      stages["backtranslate"] = {{"texts", mono.size()},
                                 {"selected", res.pairs.size()},
                                 {"audit", audit_json(res.state)}};
    }
    timings["backtranslate"] = detail::ms_since(t0);
    outputs["pairs"] = out.finish();
  }

  // ---- stats ---------------------------------------------------------------

  struct PairReport {
    std::size_t pairs = 0;
    std::size_t src_tokens = 0;
    std::size_t tgt_tokens = 0;
    std::size_t script_consistent = 0;
    std::map<std::string, std::size_t> src_hist;
    std::map<std::string, std::size_t> tgt_hist;
  };

  static std::string bucket(std::size_t n) {
    if (n >= 100) return "100+";
    const std::size_t lo = n / 10 * 10;
    return std::to_string(lo) + "-" + std::to_string(lo + 9);
  }

  static bool script_ok(std::string_view text, const LanguageTag& tag) {
    const auto d = lang::dominant_script(text);
    return !d || d->script == tag.script;
  }

  void stats_cmd() {
    auto src = open_input();
    std::map<std::string, PairReport> by_pair;
    std::size_t total = 0;
    for_pair_chunks(src.stream(), [&](const std::vector<SentencePair>& chunk) {
      for (const auto& p : chunk) {
        auto& rep = by_pair[lang::format_tag(p.src_tag) + "#" + lang::format_tag(p.tgt_tag)];
        const auto ns = text::tokenize(p.src_text).size();
        const auto nt = text::tokenize(p.tgt_text).size();
        ++rep.pairs;
        ++total;
        rep.src_tokens += ns;
        rep.tgt_tokens += nt;
        ++rep.src_hist[bucket(ns)];
        ++rep.tgt_hist[bucket(nt)];
        if (script_ok(p.src_text, p.src_tag) && script_ok(p.tgt_text, p.tgt_tag)) {
          ++rep.script_consistent;
        }
      }
    });
    Json report;
    report["pairs"] = total;
    report["language_pairs"] = Json::object();
    for (const auto& [key, rep] : by_pair) {
      Json j;
      j["pairs"] = rep.pairs;
      j["src_tokens"] = rep.src_tokens;
      j["tgt_tokens"] = rep.tgt_tokens;
      j["script_consistency"] =
          static_cast<double>(rep.script_consistent) / static_cast<double>(rep.pairs);
      j["src_length_histogram"] = rep.src_hist;
      j["tgt_length_histogram"] = rep.tgt_hist;
      report["language_pairs"][key] = j;
    }
    detail::Sink out(cfg_.str("output"));
    out.line(report.dump());
    stages["stats"] = {{"pairs", total}, {"language_pairs", by_pair.size()}};
    outputs["report"] = out.finish();
  }

  const RunConfig& cfg_;
  Resolved r_;
  std::ostream& log_;
};

inline void write_manifest(const RunConfig& cfg, const Json& manifest, std::ostream& log) {
  const auto& path = cfg.str("manifest-out");
  if (path.empty()) return;
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    log << "cannot write manifest '" << path << "'\n";
    return;
  }
  out << manifest.dump(2) << '\n';
}

inline RunOutcome run(const RunConfig& cfg, std::ostream& log = std::cerr) {
  RunOutcome outcome;
  Json& m = outcome.manifest;
  m["tool"] = "corpusforge";
  m["version"] = kVersion;
  m["command"] = cfg.command;
  m["config"] = cfg.snapshot();
  const auto t0 = std::chrono::steady_clock::now();

  std::optional<Resolved> resolved;
  try {
    resolved = resolve(cfg);
  } catch (const Error& e) {
    log << "configuration error: " << e.what() << '\n';
    outcome.exit_code = 2;
    m["error"] = e.what();
    m["exit_code"] = 2;
    write_manifest(cfg, m, log);
    return outcome;
  }

  const double budget = resolved->error_budget;
  Runner runner(cfg, std::move(*resolved), log);
  try {
    runner.execute();
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    outcome.exit_code = 2;
    m["error"] = e.what();
  } catch (const ResourceError& e) {
    log << "configuration error: " << e.what() << '\n';
    outcome.exit_code = 2;
    m["error"] = e.what();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    outcome.exit_code = 1;
    m["error"] = e.what();
  }
  m["input_sha256"] = runner.inputs;
  m["stages"] = runner.stages;
  m["outputs"] = runner.outputs;
  m["lines_read"] = runner.lines_read;
  m["malformed_lines"] = runner.malformed;
  m["error_budget"] = budget;
  if (outcome.exit_code == 0 && runner.lines_read > 0 &&
      static_cast<double>(runner.malformed) > budget * static_cast<double>(runner.lines_read)) {
    log << runner.malformed << " malformed lines of " << runner.lines_read
        << " exceed the error budget\n";
    outcome.exit_code = 1;
  }
  runner.timings["total"] = detail::ms_since(t0);
  m["timings_ms"] = runner.timings;
  m["exit_code"] = outcome.exit_code;
  write_manifest(cfg, m, log);
  return outcome;
}

}  // namespace corpusforge::cli

#endif  // CORPUSFORGE_PIPELINE_HPP_
