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

// BLEU, chrF, TER, token-level span F1 and Spearman correlation. All
// token-based metrics use text::tokenize over NFC text, the same tokenizer
// the perturbation engine uses, so span coordinates agree.

#ifndef CORPUSFORGE_METRICS_HPP_
#define CORPUSFORGE_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge::metrics {

inline std::vector<std::string> tokens_of(std::string_view s) {
  return text::token_strings(text::nfc(s));
}

namespace detail {

template <typename T>
std::map<std::vector<T>, std::size_t> ngram_counts(const std::vector<T>& seq, std::size_t n) {
  std::map<std::vector<T>, std::size_t> counts;
  if (seq.size() < n) return counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    ++counts[std::vector<T>(seq.begin() + static_cast<std::ptrdiff_t>(i),
                            seq.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

template <typename T>
std::size_t clipped_matches(const std::map<std::vector<T>, std::size_t>& hyp,
                            const std::map<std::vector<T>, std::size_t>& ref) {
  std::size_t m = 0;
  for (const auto& [gram, c] : hyp) {
    const auto it = ref.find(gram);
    if (it != ref.end()) m += std::min(c, it->second);
  }
  return m;
}

}  // namespace detail

inline constexpr double kBleuEpsilon = 1e-9;

// Corpus BLEU-4. Orders for which the candidates contain no n-grams at all
// are left out of the geometric mean; an order with n-grams but no matches
// gets precision kBleuEpsilon.
inline double bleu(const std::vector<std::string>& candidates,
                   const std::vector<std::string>& references) {
  if (candidates.size() != references.size()) {
    throw Error("bleu: " + std::to_string(candidates.size()) + " candidates vs " +
                std::to_string(references.size()) + " references");
  }
  if (candidates.empty()) throw Error("bleu: empty corpus");
  std::size_t c = 0, r = 0;
  std::size_t matches[4] = {0, 0, 0, 0};
  std::size_t totals[4] = {0, 0, 0, 0};
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto hyp = tokens_of(candidates[k]);
    const auto ref = tokens_of(references[k]);
    c += hyp.size();
    r += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto h = detail::ngram_counts(hyp, n);
      matches[n - 1] += detail::clipped_matches(h, detail::ngram_counts(ref, n));
      totals[n - 1] += hyp.size() >= n ? hyp.size() - n + 1 : 0;
    }
  }
  if (c == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (int n = 0; n < 4; ++n) {
    if (totals[n] == 0) continue;
    const double p = matches[n] == 0 ? kBleuEpsilon
                                     : static_cast<double>(matches[n]) /
                                           static_cast<double>(totals[n]);
    log_sum += std::log(p);
    ++orders;
  }
  const double bp = c < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)) : 1.0;
  return 100.0 * bp * std::exp(log_sum / orders);
}

inline double sentence_bleu(const std::string& candidate, const std::string& reference) {
  return bleu({candidate}, {reference});
}

// Mean over n = 1..max_n of the character n-gram F_beta, whitespace removed.
// Orders where neither side has n-grams are skipped.
inline double chrf(std::string_view candidate, std::string_view reference, double beta = 3.0,
                   std::size_t max_n = 6) {
  const auto strip = [](std::string_view s) {
    std::vector<char32_t> out;
    for (char32_t cp : text::code_points(text::nfc(s))) {
      if (!text::is_space(cp)) out.push_back(cp);
    }
    return out;
  };
  const auto hyp = strip(candidate);
  const auto ref = strip(reference);
  const double b2 = beta * beta;
  double sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const std::size_t hn = hyp.size() >= n ? hyp.size() - n + 1 : 0;
    const std::size_t rn = ref.size() >= n ? ref.size() - n + 1 : 0;
    if (hn == 0 && rn == 0) continue;
    ++orders;
    if (hn == 0 || rn == 0) continue;
    const auto m = static_cast<double>(
        detail::clipped_matches(detail::ngram_counts(hyp, n), detail::ngram_counts(ref, n)));
    const double p = m / static_cast<double>(hn);
    const double rc = m / static_cast<double>(rn);
    if (p + rc > 0) sum += (1 + b2) * p * rc / (b2 * p + rc);
  }
  if (orders == 0) return hyp == ref ? 100.0 : 0.0;
  return 100.0 * sum / static_cast<double>(orders);
}

// Token Levenshtein distance.
inline std::size_t levenshtein(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct TerStats {
  std::size_t edits = 0;   // shifts + Levenshtein edits after shifting
  std::size_t shifts = 0;
  std::size_t ref_length = 0;
  double score() const {
    return 100.0 * static_cast<double>(edits) / static_cast<double>(ref_length);
  }
};

inline constexpr std::size_t kMaxShiftLength = 10;

// Greedy block-shift search: repeatedly apply the single shift that lowers
// shift + edit cost the most, considering blocks of up to kMaxShiftLength
// tokens that occur in the reference, moved to near where they occur there.
inline TerStats ter_stats(std::string_view hypothesis, std::string_view reference) {
  const auto hyp_s = tokens_of(hypothesis);
  const auto ref_s = tokens_of(reference);
  if (ref_s.empty()) throw Error("ter: empty reference");
  std::unordered_map<std::string, int> ids;
  const auto encode = [&](const std::vector<std::string>& v) {
    std::vector<int> out;
    out.reserve(v.size());
    for (const auto& w : v) out.push_back(ids.emplace(w, static_cast<int>(ids.size())).first->second);
    return out;
  };
  std::vector<int> cur = encode(hyp_s);
  const std::vector<int> ref = encode(ref_s);

  TerStats st;
  st.ref_length = ref.size();
  std::size_t ed = levenshtein(cur, ref);
  while (ed > 0) {
    std::size_t best_cost = ed;  // cost of stopping here
    std::vector<int> best;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::size_t len = 1; len <= kMaxShiftLength && i + len <= cur.size(); ++len) {
        std::vector<int> rest(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(i));
        rest.insert(rest.end(), cur.begin() + static_cast<std::ptrdiff_t>(i + len), cur.end());
        std::set<std::size_t> dests;
        for (std::size_t j = 0; j + len <= ref.size(); ++j) {
          if (!std::equal(cur.begin() + static_cast<std::ptrdiff_t>(i),
                          cur.begin() + static_cast<std::ptrdiff_t>(i + len),
                          ref.begin() + static_cast<std::ptrdiff_t>(j))) {
            continue;
          }
          for (std::size_t d = j == 0 ? 0 : j - 1; d <= j + 1; ++d) {
            if (d <= rest.size() && d != i) dests.insert(d);
          }
        }
        for (std::size_t d : dests) {
          std::vector<int> cand(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(d));
          cand.insert(cand.end(), cur.begin() + static_cast<std::ptrdiff_t>(i),
                      cur.begin() + static_cast<std::ptrdiff_t>(i + len));
          cand.insert(cand.end(), rest.begin() + static_cast<std::ptrdiff_t>(d), rest.end());
          const std::size_t e = levenshtein(cand, ref);
          if (e + 1 < best_cost) {
            best_cost = e + 1;
            best = std::move(cand);
          }
        }
      }
    }
    if (best.empty()) break;
    cur = std::move(best);
    ed = best_cost - 1;
    ++st.shifts;
  }
  st.edits = st.shifts + ed;
  return st;
}

inline double ter(std::string_view hypothesis, std::string_view reference) {
  return ter_stats(hypothesis, reference).score();
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
};
using SpanSet = std::vector<Span>;

inline void validate_spans(const SpanSet& spans, std::size_t text_length) {
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto& s = spans[k];
    if (s.end <= s.start || s.end > text_length) {
      throw Error("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                  ") invalid for " + std::to_string(text_length) + " tokens");
    }
    if (k > 0 && s.start < spans[k - 1].end) throw Error("spans overlap or are unsorted");
  }
}

// Token-level F1 over covered indices. Both empty gives 1.
inline double span_f1(const SpanSet& predicted, const SpanSet& gold, std::size_t text_length) {
  validate_spans(predicted, text_length);
  validate_spans(gold, text_length);
  std::vector<bool> p(text_length, false), g(text_length, false);
  std::size_t np = 0, ng = 0, both = 0;
  for (const auto& s : predicted) {
    for (auto i = s.start; i < s.end; ++i) p[i] = true;
    np += s.end - s.start;
  }
  for (const auto& s : gold) {
    for (auto i = s.start; i < s.end; ++i) {
      g[i] = true;
      if (p[i]) ++both;
    }
    ng += s.end - s.start;
  }
  if (np == 0 && ng == 0) return 1.0;
  if (np == 0 || ng == 0 || both == 0) return 0.0;
  const double prec = static_cast<double>(both) / static_cast<double>(np);
  const double rec = static_cast<double>(both) / static_cast<double>(ng);
  return 2 * prec * rec / (prec + rec);
}

inline std::vector<double> average_ranks(const std::vector<double>& xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline std::optional<double> pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Spearman's rho; nullopt when either input is constant.
inline std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error("spearman: length mismatch");
  if (xs.size() < 2) throw Error("spearman: need at least two observations");
  return pearson(average_ranks(xs), average_ranks(ys));
}

}  // namespace corpusforge::metrics

#endif  // CORPUSFORGE_METRICS_HPP_
