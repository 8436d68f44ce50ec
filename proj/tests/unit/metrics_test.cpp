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


#include <gtest/gtest.h>

#include <cmath>

#include "corpusforge/metrics.hpp"

namespace m = corpusforge::metrics;

TEST(Bleu, IdentityIsHundred) {
  EXPECT_DOUBLE_EQ(m::sentence_bleu("the cat sat on the mat", "the cat sat on the mat"), 100.0);
}

TEST(Bleu, BrevityPenaltyOnly) {
  // All n-grams match; BP = exp(1 - 6/3).
  EXPECT_NEAR(m::sentence_bleu("the cat sat", "the cat sat on the mat"), 36.787944117, 1e-6);
}

TEST(Bleu, EffectiveOrderForShortCandidate) {
  // One unigram, no higher orders: precision 1, BP exp(1 - 2).
  EXPECT_NEAR(m::sentence_bleu("cat", "the cat"), 36.787944117, 1e-6);
}

TEST(Bleu, NoMatchIsNearZero) {
  EXPECT_LT(m::sentence_bleu("x y z", "a b c"), 1e-6);
  EXPECT_DOUBLE_EQ(m::bleu({""}, {"a b"}), 0.0);
}

TEST(Bleu, CorpusPoolsCounts) {
  // Pooled: p1 = 5/5, p2 = 3/3, p3 = 1/1, p4 absent; c = 5, r = 6.
  EXPECT_NEAR(m::bleu({"a b c", "d e"}, {"a b c", "d e f"}), 100.0 * std::exp(1.0 - 6.0 / 5.0), 1e-6);
}

TEST(Chrf, FrozenValues) {
  // F per order: 3/4, 2/3, 1/2, 0; orders 5 and 6 are empty on both sides.
  EXPECT_NEAR(m::chrf("abcd", "abce"), 47.916666667, 1e-6);
  EXPECT_DOUBLE_EQ(m::chrf("a b", "ab"), 100.0);
  EXPECT_DOUBLE_EQ(m::chrf("", ""), 100.0);
  EXPECT_DOUBLE_EQ(m::chrf("xyz", "abc"), 0.0);
}

TEST(Chrf, CountsCodePointsNotBytes) {
  EXPECT_DOUBLE_EQ(m::chrf("घर", "घर"), 100.0);
  EXPECT_LT(m::chrf("घर", "घट"), 100.0);
}

TEST(Ter, FrozenReferenceValues) {
  EXPECT_DOUBLE_EQ(m::ter("he went home", "he went home"), 0.0);
  EXPECT_NEAR(m::ter("the cat sat", "the cat sat on the mat"), 50.0, 1e-9);
  EXPECT_NEAR(m::ter("the quick brown fox jumps", "the brown quick fox jumps"), 20.0, 1e-9);
  EXPECT_NEAR(m::ter("he went to the market today", "today he went to the market"),
              100.0 / 6.0, 1e-9);
  EXPECT_NEAR(m::ter("a b c d e f", "f e d c b a"), 500.0 / 6.0, 1e-9);
  EXPECT_NEAR(m::ter("the the the the", "the cat"), 150.0, 1e-9);
}

TEST(Ter, StatsExposeShiftsAndEdits) {
  const auto s = m::ter_stats("one two three four five", "three four five one two");
  EXPECT_EQ(s.shifts, 1u);
  EXPECT_EQ(s.edits, 1u);
  EXPECT_EQ(s.ref_length, 5u);
  EXPECT_DOUBLE_EQ(s.score(), 20.0);
}

TEST(SpanF1, Cases) {
  EXPECT_DOUBLE_EQ(m::span_f1({}, {}, 4), 1.0);
  EXPECT_DOUBLE_EQ(m::span_f1({{0, 2}}, {}, 4), 0.0);
  EXPECT_DOUBLE_EQ(m::span_f1({{0, 2}}, {{0, 2}}, 4), 1.0);
  EXPECT_DOUBLE_EQ(m::span_f1({{0, 1}}, {{2, 3}}, 4), 0.0);
  // p = 1/2, r = 1/1.
  EXPECT_NEAR(m::span_f1({{0, 2}}, {{1, 2}}, 4), 2.0 / 3.0, 1e-12);
  EXPECT_THROW(m::span_f1({{2, 1}}, {}, 4), corpusforge::Error);
  EXPECT_THROW(m::span_f1({{0, 5}}, {}, 4), corpusforge::Error);
}

TEST(Spearman, FrozenValues) {
  EXPECT_NEAR(*m::spearman({1, 2, 3, 4, 5}, {5, 6, 7, 8, 7}), 0.8207826816681233, 1e-12);
  EXPECT_NEAR(*m::spearman({3, 1, 2, 2}, {10, 30, 20, 20}), -1.0, 1e-12);
  EXPECT_FALSE(m::spearman({1, 1, 1}, {1, 2, 3}).has_value());
  EXPECT_THROW(m::spearman({1}, {1}), corpusforge::Error);
}

TEST(Spearman, AverageRanksForTies) {
  EXPECT_EQ(m::average_ranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}
