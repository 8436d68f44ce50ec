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

// Translation and quality-scoring backends. Implementations must be safe to
// call from several threads at once; the orchestrator keeps batches in flight
// concurrently.

#ifndef CORPUSFORGE_BACKENDS_HPP_
#define CORPUSFORGE_BACKENDS_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/lang_registry.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge::augment {

using lang::LanguageTag;
using TextPair = std::pair<std::string, std::string>;

class TranslatorClient {
 public:
  virtual ~TranslatorClient() = default;
  // Order-preserving; the result has exactly texts.size() entries.
  virtual std::vector<std::string> translate(const std::vector<std::string>& texts,
                                             const LanguageTag& src, const LanguageTag& tgt) = 0;
};

class ScorerClient {
 public:
  virtual ~ScorerClient() = default;
  // One 0-100 score per (source, target) pair, in order.
  virtual std::vector<double> score(const std::vector<TextPair>& pairs, const LanguageTag& src,
                                    const LanguageTag& tgt) = 0;
};

// Wraps a per-text function. Used for stubs and scripted tests.
class FunctionTranslator : public TranslatorClient {
 public:
  using Fn = std::function<std::string(const std::string&, const LanguageTag&, const LanguageTag&)>;
  explicit FunctionTranslator(Fn fn) : fn_(std::move(fn)) {}

  std::vector<std::string> translate(const std::vector<std::string>& texts, const LanguageTag& src,
                                     const LanguageTag& tgt) override {
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(fn_(t, src, tgt));
    return out;
  }

 private:
  Fn fn_;
};

class FunctionScorer : public ScorerClient {
 public:
  using Fn = std::function<double(const std::string&, const std::string&)>;
  explicit FunctionScorer(Fn fn) : fn_(std::move(fn)) {}

  std::vector<double> score(const std::vector<TextPair>& pairs, const LanguageTag&,
                            const LanguageTag&) override {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [s, t] : pairs) out.push_back(fn_(s, t));
    return out;
  }

 private:
  Fn fn_;
};

// Deterministic offline translator: returns the input unchanged.
class EchoTranslator : public TranslatorClient {
 public:
  std::vector<std::string> translate(const std::vector<std::string>& texts, const LanguageTag&,
                                     const LanguageTag&) override {
    return texts;
  }
};

// Deterministic offline scorer: 100 * shorter / longer, in code points,
// clamped to [1, 100].
class LengthRatioScorer : public ScorerClient {
 public:
  std::vector<double> score(const std::vector<TextPair>& pairs, const LanguageTag&,
                            const LanguageTag&) override {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [s, t] : pairs) {
      const double a = static_cast<double>(text::code_point_count(s));
      const double b = static_cast<double>(text::code_point_count(t));
      const double hi = std::max(a, b);
      const double v = hi == 0 ? 100.0 : 100.0 * std::min(a, b) / hi;
      out.push_back(std::clamp(v, 1.0, 100.0));
    }
    return out;
  }
};

// Fixed score per exact (source, target) pair; `fallback` otherwise.
class TableScorer : public ScorerClient {
 public:
  explicit TableScorer(std::map<TextPair, double> table, double fallback = 1.0)
      : table_(std::move(table)), fallback_(fallback) {}

  std::vector<double> score(const std::vector<TextPair>& pairs, const LanguageTag&,
                            const LanguageTag&) override {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
      const auto it = table_.find(p);
      out.push_back(it == table_.end() ? fallback_ : it->second);
    }
    return out;
  }

 private:
  std::map<TextPair, double> table_;
  double fallback_;
};

}  // namespace corpusforge::augment

#endif  // CORPUSFORGE_BACKENDS_HPP_
