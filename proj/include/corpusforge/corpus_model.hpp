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

// Sentence pairs, passages and task records, with streaming TSV / JSONL
// readers and writers. All text is NFC-normalized on the way in.

#ifndef CORPUSFORGE_CORPUS_MODEL_HPP_
#define CORPUSFORGE_CORPUS_MODEL_HPP_

#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/unicode.hpp"
#include "json.hpp"

namespace corpusforge::corpus {

using lang::LanguageTag;
using Json = nlohmann::ordered_json;

enum class Provenance { kHuman, kMined, kPivot, kBacktranslated, kPerturbed };

inline std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kHuman: return "human";
    case Provenance::kMined: return "mined";
    case Provenance::kPivot: return "pivot";
    case Provenance::kBacktranslated: return "backtranslated";
    case Provenance::kPerturbed: return "perturbed";
  }
  return "human";
}

inline std::optional<Provenance> provenance_from_name(std::string_view s) {
  for (auto p : {Provenance::kHuman, Provenance::kMined, Provenance::kPivot,
                 Provenance::kBacktranslated, Provenance::kPerturbed}) {
    if (provenance_name(p) == s) return p;
  }
  return std::nullopt;
}

inline constexpr std::string_view kDefaultDomain = "general";
inline constexpr double kMinScore = 1.0;
inline constexpr double kMaxScore = 100.0;

struct SentencePair {
  std::string id;
  LanguageTag src_tag;
  LanguageTag tgt_tag;
  std::string src_text;
  std::string tgt_text;
  std::string domain{kDefaultDomain};
  Provenance provenance = Provenance::kHuman;
  std::optional<double> score;
  std::vector<std::string> extra;  // TSV columns past the score, kept verbatim

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

// Returns an error message, or nullopt when the pair satisfies its invariants.
inline std::optional<std::string> check_pair(const SentencePair& p) {
  if (text::trim(p.src_text).empty()) return "empty source text";
  if (text::trim(p.tgt_text).empty()) return "empty target text";
  if (p.score && !(*p.score >= kMinScore && *p.score <= kMaxScore)) {
    return "score outside [1, 100]";
  }
  return std::nullopt;
}

struct Passage {
  std::string id;
  LanguageTag tag;
  std::vector<std::string> sentences;
  std::string domain{kDefaultDomain};
};

struct CorpusStats {
  std::size_t total = 0;
  std::size_t kept = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> rejected_by_reason;

  void keep() {
    ++total;
    ++kept;
  }
  void reject(const std::string& reason) {
    ++total;
    ++rejected;
    ++rejected_by_reason[reason];
  }

  bool balanced() const {
    std::size_t sum = 0;
    for (const auto& [_, n] : rejected_by_reason) sum += n;
    return kept + rejected == total && sum == rejected;
  }

  Json to_json() const {
    Json j;
    j["total"] = total;
    j["kept"] = kept;
    j["rejected"] = rejected;
    j["rejected_by_reason"] = Json::object();
    for (const auto& [reason, n] : rejected_by_reason) j["rejected_by_reason"][reason] = n;
    return j;
  }

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

// ---------------------------------------------------------------------------
// Pair readers

enum class Format { kTsv, kJsonl };

inline std::optional<Format> format_from_name(std::string_view s) {
  if (s == "tsv") return Format::kTsv;
  if (s == "jsonl") return Format::kJsonl;
  return std::nullopt;
}

struct LineError {
  std::size_t line = 0;         // 1-based
  std::size_t byte_offset = 0;  // from the start of the stream
  std::string message;
};

struct ReaderOptions {
  LanguageTag src_tag;
  LanguageTag tgt_tag;
  std::string domain{kDefaultDomain};
  Provenance provenance = Provenance::kHuman;
  const lang::Registry* registry = nullptr;  // for JSONL tags; bundled when null
};

using ReadItem = std::variant<SentencePair, LineError>;

// Pulls one pair (or one line-level error) per call. Holds a single line in
// memory; malformed lines never abort the stream.
class PairReader {
 public:
  PairReader(std::istream& in, Format format, ReaderOptions options)
      : in_(in), format_(format), options_(std::move(options)) {}

  std::optional<ReadItem> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      const std::size_t line_start = offset_;
      offset_ += line.size() + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (const auto bad = text::find_invalid_utf8(line)) {
        return LineError{line_no_, line_start + *bad, "invalid UTF-8"};
      }
      try {
        SentencePair pair = format_ == Format::kTsv ? parse_tsv(line) : parse_jsonl(line);
        if (auto err = check_pair(pair)) return LineError{line_no_, line_start, *err};
        return pair;
      } catch (const std::exception& e) {
        return LineError{line_no_, line_start, e.what()};
      }
    }
    return std::nullopt;
  }

  std::size_t lines_read() const { return line_no_; }

 private:
  SentencePair base() const {
    SentencePair p;
    p.id = std::to_string(line_no_);
    p.src_tag = options_.src_tag;
    p.tgt_tag = options_.tgt_tag;
    p.domain = options_.domain;
    p.provenance = options_.provenance;
    return p;
  }

  SentencePair parse_tsv(const std::string& line) const {
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    while (true) {
      const auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (cols.size() < 2) {
      throw ParseError("expected at least 2 tab-separated columns, got " +
                       std::to_string(cols.size()));
    }
    SentencePair p = base();
    p.src_text = text::nfc(cols[0]);
    p.tgt_text = text::nfc(cols[1]);
    if (cols.size() >= 3 && !text::trim(cols[2]).empty()) {
      const std::string s(text::trim(cols[2]));
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || !std::isfinite(v)) throw ParseError("bad score column '" + s + "'");
      p.score = v;
    }
    for (std::size_t i = 3; i < cols.size(); ++i) p.extra.emplace_back(cols[i]);
    return p;
  }

  SentencePair parse_jsonl(const std::string& line) const {
    const Json j = Json::parse(line);
    if (!j.is_object()) throw ParseError("line is not a JSON object");
    SentencePair p = base();
    if (j.contains("id")) {
      p.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    }
    p.src_text = text::nfc(j.at("src").get<std::string>());
    p.tgt_text = text::nfc(j.at("tgt").get<std::string>());
    const auto& reg = options_.registry ? *options_.registry : lang::Registry::bundled();
    if (j.contains("src_tag")) p.src_tag = lang::parse_tag(j["src_tag"].get<std::string>(), reg);
    if (j.contains("tgt_tag")) p.tgt_tag = lang::parse_tag(j["tgt_tag"].get<std::string>(), reg);
    if (j.contains("domain")) p.domain = j["domain"].get<std::string>();
    if (j.contains("provenance")) {
      const auto prov = provenance_from_name(j["provenance"].get<std::string>());
      if (!prov) throw ParseError("unknown provenance");
      p.provenance = *prov;
    }
    if (j.contains("score") && !j["score"].is_null()) p.score = j["score"].get<double>();
    if (j.contains("extra")) p.extra = j["extra"].get<std::vector<std::string>>();
    return p;
  }

  std::istream& in_;
  Format format_;
  ReaderOptions options_;
  std::size_t line_no_ = 0;
  std::size_t offset_ = 0;
};

// Drains a reader; convenient for tests and small inputs.
struct ReadAll {
  std::vector<SentencePair> pairs;
  std::vector<LineError> errors;
};

inline ReadAll read_pairs(std::istream& in, Format format, const ReaderOptions& options) {
  ReadAll out;
  PairReader reader(in, format, options);
  while (auto item = reader.next()) {
    if (auto* p = std::get_if<SentencePair>(&*item)) {
      out.pairs.push_back(std::move(*p));
    } else {
      out.errors.push_back(std::get<LineError>(*item));
    }
  }
  return out;
}

inline Json pair_to_json(const SentencePair& p) {
  Json j;
  j["id"] = p.id;
  j["src_tag"] = lang::format_tag(p.src_tag);
  j["tgt_tag"] = lang::format_tag(p.tgt_tag);
  j["src"] = p.src_text;
  j["tgt"] = p.tgt_text;
  j["domain"] = p.domain;
  j["provenance"] = provenance_name(p.provenance);
  if (p.score) j["score"] = *p.score;
  if (!p.extra.empty()) j["extra"] = p.extra;
  return j;
}

inline void write_pair(std::ostream& out, const SentencePair& p, Format format) {
  if (format == Format::kJsonl) {
    out << pair_to_json(p).dump() << '\n';
    return;
  }
  out << p.src_text << '\t' << p.tgt_text;
  if (p.score || !p.extra.empty()) {
    out << '\t';
    if (p.score) out << Json(*p.score).dump();
  }
  for (const auto& e : p.extra) out << '\t' << e;
  out << '\n';
}

// ---------------------------------------------------------------------------
// Task records

using OutputValue = std::variant<std::string, double>;

struct TaskRecord {
  std::string task;
  std::string domain{kDefaultDomain};
  std::vector<std::pair<std::string, std::string>> input;
  std::vector<std::pair<std::string, OutputValue>> output;

  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

struct TaskString {
  std::string name;
  std::string src;
  std::string tgt;
};

inline std::string make_task_string(std::string_view name, std::string_view src,
                                    std::string_view tgt) {
  std::string s(name);
  s += '$';
  s += src;
  s += '#';
  s += tgt;
  return s;
}

// NAME$SRC#TGT with exactly one '$' and one '#'.
inline TaskString split_task_string(std::string_view task) {
  const auto dollar = task.find('$');
  const auto hash = task.find('#');
  if (dollar == std::string_view::npos || hash == std::string_view::npos || hash < dollar ||
      task.find('$', dollar + 1) != std::string_view::npos ||
      task.find('#', hash + 1) != std::string_view::npos) {
    throw ParseError("task string '" + std::string(task) + "' is not NAME$SRC#TGT");
  }
  return TaskString{std::string(task.substr(0, dollar)),
                    std::string(task.substr(dollar + 1, hash - dollar - 1)),
                    std::string(task.substr(hash + 1))};
}

inline std::optional<std::string> check_record(const TaskRecord& r) {
  try {
    const auto parts = split_task_string(r.task);
    if (parts.name.empty() || parts.src.empty() || parts.tgt.empty()) {
      return "task string has an empty part";
    }
  } catch (const ParseError& e) {
    return e.what();
  }
  for (std::size_t i = 0; i < r.input.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (r.input[k].first == r.input[i].first) return "duplicate input key '" + r.input[i].first + "'";
    }
  }
  for (std::size_t i = 0; i < r.output.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (r.output[k].first == r.output[i].first) {
        return "duplicate output key '" + r.output[i].first + "'";
      }
    }
  }
  for (const auto& [key, value] : r.output) {
    if (const auto* v = std::get_if<double>(&value)) {
      if (!(*v >= kMinScore && *v <= kMaxScore)) return "numeric output '" + key + "' outside [1, 100]";
    }
  }
  return std::nullopt;
}

inline Json record_to_json(const TaskRecord& r) {
  Json j;
  j["task"] = r.task;
  j["domain"] = r.domain;
  j["input"] = Json::object();
  for (const auto& [k, v] : r.input) j["input"][k] = v;
  j["output"] = Json::object();
  for (const auto& [k, v] : r.output) {
    std::visit([&](const auto& x) { j["output"][k] = x; }, v);
  }
  return j;
}

inline TaskRecord record_from_json(const Json& j) {
  TaskRecord r;
  r.task = j.at("task").get<std::string>();
  r.domain = j.at("domain").get<std::string>();
  for (const auto& [k, v] : j.at("input").items()) r.input.emplace_back(k, v.get<std::string>());
  for (const auto& [k, v] : j.at("output").items()) {
    if (v.is_number()) {
      r.output.emplace_back(k, v.get<double>());
    } else {
      r.output.emplace_back(k, v.get<std::string>());
    }
  }
  return r;
}

inline TaskRecord parse_record_line(std::string_view line) {
  try {
    return record_from_json(Json::parse(line));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad task record: ") + e.what());
  }
}

// Raised when the sink fails mid-stream; `written` lines made it out.
class WriteError : public Error {
 public:
  WriteError(const std::string& what, std::size_t written) : Error(what), written(written) {}
  std::size_t written;
};

class RecordWriter {
 public:
  explicit RecordWriter(std::ostream& out) : out_(out) {}

  void write(const TaskRecord& r) {
    if (auto err = check_record(r)) throw ParseError("invalid task record: " + *err);
    out_ << record_to_json(r).dump() << '\n';
    if (!out_) throw WriteError("write failed after " + std::to_string(count_) + " records", count_);
    ++count_;
  }

  std::size_t count() const { return count_; }

 private:
  std::ostream& out_;
  std::size_t count_ = 0;
};

template <typename Range>
std::size_t write_records(const Range& records, std::ostream& out) {
  RecordWriter w(out);
  for (const auto& r : records) w.write(r);
  out.flush();
  if (!out) throw WriteError("flush failed", w.count());
  return w.count();
}

inline std::vector<TaskRecord> read_records(std::istream& in) {
  std::vector<TaskRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(parse_record_line(line));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deduplication

inline std::string dedupe_key(const SentencePair& p) {
  std::string key = text::collapse_whitespace(text::nfc(p.src_text));
  key += '\t';
  key += text::collapse_whitespace(text::nfc(p.tgt_text));
  return key;
}

// Streaming form: remembers every key seen so far.
class Deduper {
 public:
  bool first_seen(const SentencePair& p) { return seen_.insert(dedupe_key(p)).second; }

 private:
  std::unordered_set<std::string> seen_;
};

inline std::vector<SentencePair> dedupe(const std::vector<SentencePair>& pairs) {
  Deduper d;
  std::vector<SentencePair> out;
  for (const auto& p : pairs) {
    if (d.first_seen(p)) out.push_back(p);
  }
  return out;
}

}  // namespace corpusforge::corpus

#endif  // CORPUSFORGE_CORPUS_MODEL_HPP_
