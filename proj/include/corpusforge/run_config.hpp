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

// Run configuration: a flat key/value store with a fixed schema. Values come
// from, in increasing precedence, built-in defaults, a config file,
// CORPUSFORGE_* environment variables (backend URLs only) and command-line
// flags. Config file grammar, one entry per line:
//
//   # comment
//   key = value
//
// Keys are the long flag names without the leading dashes. Blank lines are
// ignored; surrounding whitespace is trimmed; an empty value is allowed.

#ifndef CORPUSFORGE_RUN_CONFIG_HPP_
#define CORPUSFORGE_RUN_CONFIG_HPP_

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/unicode.hpp"
#include "json.hpp"

namespace corpusforge::cli {

struct KeySpec {
  std::string_view key;
  std::string_view default_value;
  std::string_view help;
};

inline constexpr KeySpec kConfigKeys[] = {
    // I/O
    {"input", "-", "input path, - for stdin"},
    {"output", "-", "output path, - for stdout"},
    {"format", "auto", "input format: tsv, jsonl, or auto (by extension)"},
    {"verdicts", "", "clean: write per-pair verdicts (JSONL) here"},
    {"manifest-out", "", "write the run manifest (JSON) here"},
    {"registry", "", "language registry TSV; empty uses the bundled table"},
    {"src-tag", "", "source language tag, Family+code_Script"},
    {"tgt-tag", "", "target language tag, Family+code_Script"},
    {"domain", "general", "domain for TSV input"},
    // Run control
    {"seed", "0", "global seed"},
    {"jobs", "1", "worker threads"},
    {"chunk-size", "10000", "pairs per processing chunk"},
    {"error-budget", "0.001", "tolerated fraction of malformed input lines"},
    // clean
    {"stages", "length,language_script,markup,qe_score", "clean: enabled stages"},
    {"max-word-delta", "10", "clean: max word-count difference"},
    {"max-char-delta", "", "clean: max character-count difference; empty derives it"},
    {"majority", "0.5", "clean: share of words that must match the declared language"},
    {"qe-margin", "10", "clean: keep pairs scoring at least mean - margin"},
    {"use-attached-scores", "true", "clean: use scores carried by the input"},
    // perturb / synth
    {"task", "gec", "synth: gec, ape, errmark, errmark-correct, da, qe, translation"},
    {"kinds", "", "perturbation kinds, comma separated; empty uses every available kind"},
    {"rate-min", "", "perturbation rate lower bound; empty uses the task default"},
    {"rate-max", "", "perturbation rate upper bound; empty uses the task default"},
    {"lexicons", "", "lexicon root directory"},
    {"min-stem-len", "3", "inflection trie stem length"},
    {"da-literal-tp", "false", "da: average Ep with Tp instead of with TER"},
    // score
    {"hypotheses", "", "score: hypothesis file, one segment per line"},
    {"references", "", "score: reference file, one segment per line"},
    // backends
    {"translator", "echo", "translator stub when no URL is set: echo"},
    {"scorer", "length-ratio", "scorer stub when no URL is set: length-ratio"},
    {"translator-url", "", "HTTP translator endpoint"},
    {"scorer-url", "", "HTTP scorer endpoint"},
    {"timeout-ms", "30000", "backend request timeout"},
    {"retries", "4", "backend attempts per request"},
    {"batch-size", "64", "backend batch size"},
    {"in-flight", "4", "backend batches in flight"},
    // align / pivot / backtranslate
    {"src-doc", "", "align: source sentences, one per line"},
    {"tgt-doc", "", "align: target sentences, one per line"},
    {"band", "5", "align: diagonal band width"},
    {"threshold", "50", "align: minimum score of a kept match"},
    {"pivot-tag", "", "pivot: tag of the pivot language"},
    {"target-tag", "", "pivot: tag of the new target language"},
    {"checkpoint", "", "pivot: checkpoint file for resuming"},
    {"rounds", "5", "backtranslate: rounds"},
    {"into-tag", "", "backtranslate: language to translate into"},
    {"passages", "false", "backtranslate: input is JSONL passages"},
};

inline const KeySpec* find_key(std::string_view key) {
  for (const auto& k : kConfigKeys) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

inline constexpr std::string_view kTranslatorUrlEnv = "CORPUSFORGE_TRANSLATOR_URL";
inline constexpr std::string_view kScorerUrlEnv = "CORPUSFORGE_SCORER_URL";

class RunConfig {
 public:
  RunConfig() {
    for (const auto& k : kConfigKeys) values_[std::string(k.key)] = std::string(k.default_value);
  }

  std::string command;

  void set(std::string_view key, std::string value) {
    if (!find_key(key)) throw ConfigError("unknown config key '" + std::string(key) + "'");
    values_[std::string(key)] = std::move(value);
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      const auto t = text::trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError(path + ":" + std::to_string(n) + ": expected key = value");
      }
      const std::string key(text::trim(t.substr(0, eq)));
      try {
        set(key, std::string(text::trim(t.substr(eq + 1))));
      } catch (const ConfigError& e) {
        throw ConfigError(path + ":" + std::to_string(n) + ": " + e.what());
      }
    }
  }

  void apply_environment() {
    if (const char* v = std::getenv(std::string(kTranslatorUrlEnv).c_str()); v && *v) {
      set("translator-url", v);
    }
    if (const char* v = std::getenv(std::string(kScorerUrlEnv).c_str()); v && *v) {
      set("scorer-url", v);
    }
  }

  const std::string& str(std::string_view key) const {
    const auto it = values_.find(std::string(key));
    if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
    return it->second;
  }

  int64_t integer(std::string_view key) const {
    const auto& v = str(key);
    std::size_t used = 0;
    int64_t out = 0;
    try {
      out = std::stoll(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v.empty() || used != v.size()) bad(key, "an integer");
    return out;
  }

  uint64_t u64(std::string_view key) const {
    const auto& v = str(key);
    std::size_t used = 0;
    uint64_t out = 0;
    try {
      if (!v.empty() && v[0] != '-') out = std::stoull(v, &used, 0);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v.empty() || used != v.size()) bad(key, "a non-negative integer");
    return out;
  }

  std::size_t count(std::string_view key, std::size_t min = 0) const {
    const auto v = integer(key);
    if (v < static_cast<int64_t>(min)) bad(key, "an integer >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  double real(std::string_view key) const {
    const auto& v = str(key);
    std::size_t used = 0;
    double out = 0;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v.empty() || used != v.size()) bad(key, "a number");
    return out;
  }

  std::optional<double> optional_real(std::string_view key) const {
    if (str(key).empty()) return std::nullopt;
    return real(key);
  }

  bool flag(std::string_view key) const {
    const auto& v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad(key, "true or false");
    return false;
  }

  std::vector<std::string> list(std::string_view key) const {
    std::vector<std::string> out;
    std::string_view rest = str(key);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = text::trim(rest.substr(0, comma));
      if (!item.empty()) out.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  nlohmann::ordered_json snapshot() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["command"] = command;
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  [[noreturn]] static void bad(std::string_view key, const std::string& want) {
    throw ConfigError("config key '" + std::string(key) + "' must be " + want);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace corpusforge::cli

#endif  // CORPUSFORGE_RUN_CONFIG_HPP_
