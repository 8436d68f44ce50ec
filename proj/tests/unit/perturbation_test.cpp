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

#include <string>

#include "corpusforge/inflection_trie.hpp"
#include "corpusforge/lexicon.hpp"
#include "corpusforge/perturbation.hpp"

namespace cf = corpusforge;
namespace p = corpusforge::perturb;

namespace {

const cf::lang::LanguageTag& eng() {
  static const auto t = cf::lang::parse_tag("WestGermanic+eng_Latn");
  return t;
}

const p::LexiconSet& lexicons() {
  static const auto l =
      p::LexiconSet::load(std::string(CORPUSFORGE_SOURCE_DIR) + "/data/lexicons", {eng()});
  return l;
}

const p::InflectionTrie& trie() {
  static const auto t = p::InflectionTrie::build(lexicons().find(eng())->vocabulary, 3);
  return t;
}

std::size_t touched(const p::EditLog& log) {
  std::size_t n = 0;
  for (const auto& e : log.edits) n += e.positions;
  return n;
}

const std::string kTwenty =
    "the teacher walked to the market and she bought bread because the river was high , "
    "so he stayed home";

}  // namespace

TEST(TokenBudget, RoundsHalfUpWithFloorOfOne) {
  EXPECT_EQ(p::token_budget(0.15, 20), 3u);
  EXPECT_EQ(p::token_budget(0.05, 10), 1u);   // 0.5 rounds up
  EXPECT_EQ(p::token_budget(0.001, 12), 1u);  // floor of one
  EXPECT_EQ(p::token_budget(0.02, 75), 2u);   // 1.5 rounds up
  EXPECT_EQ(p::token_budget(0.5, 7), 4u);
  EXPECT_EQ(p::token_budget(0.2, 0), 0u);
}

TEST(Perturb, TokenNoiseRealizesBudget) {
  ASSERT_EQ(cf::text::tokenize(kTwenty).size(), 20u);
  const p::PerturbationPlan plan{{p::Kind::kTokenNoise}, 0.15, 11, eng()};
  const auto r = p::apply_perturbations(kTwenty, plan, lexicons(), &trie());
  EXPECT_EQ(r.log.budget, 3u);
  EXPECT_EQ(r.log.realized, 3u);
  EXPECT_EQ(touched(r.log), 3u);
  EXPECT_EQ(r.log.shortfall, 0u);
  EXPECT_NE(r.text, kTwenty);
  EXPECT_DOUBLE_EQ(r.log.error_percentage(), 15.0);
}

TEST(Perturb, SameSeedSameOutput) {
  const p::PerturbationPlan plan{{p::Kind::kPronounSwap, p::Kind::kSpelling, p::Kind::kWordOrder},
                                 0.2, 1234, eng()};
  const auto a = p::apply_perturbations(kTwenty, plan, lexicons(), &trie());
  const auto b = p::apply_perturbations(kTwenty, plan, lexicons(), &trie());
  EXPECT_EQ(a.text, b.text);
  EXPECT_EQ(a.log.to_json(), b.log.to_json());
  auto other = plan;
  other.seed = 1235;
  bool differs = false;
  for (uint64_t s = 1235; s < 1245 && !differs; ++s) {
    other.seed = s;
    differs = p::apply_perturbations(kTwenty, other, lexicons(), &trie()).text != a.text;
  }
  EXPECT_TRUE(differs);
}

TEST(Perturb, ShortfallWhenEligiblePositionsRunOut) {
  // One pronoun in the text; budget of 3.
  const std::string text = "the old teacher walked to the market and she bought bread today";
  const p::PerturbationPlan plan{{p::Kind::kPronounSwap}, 0.25, 5, eng()};
  const auto r = p::apply_perturbations(text, plan, lexicons(), &trie());
  EXPECT_EQ(r.log.budget, 3u);
  EXPECT_EQ(r.log.realized, 1u);
  EXPECT_EQ(r.log.shortfall, 2u);
}

TEST(Perturb, ReconstructReplaysLog) {
  for (p::Kind k : p::kAllKinds) {
    const p::PerturbationPlan plan{{k}, 0.15, 77, eng()};
    const auto r = p::apply_perturbations(kTwenty, plan, lexicons(), &trie());
    EXPECT_EQ(p::reconstruct(kTwenty, r.log), r.text) << p::kind_name(k);
  }
}

TEST(Perturb, ReconstructRejectsForeignLog) {
  const p::PerturbationPlan plan{{p::Kind::kMask}, 0.1, 3, eng()};
  const auto r = p::apply_perturbations(kTwenty, plan, lexicons(), &trie());
  EXPECT_THROW(p::reconstruct("too short", r.log), cf::CorruptLogError);
}

TEST(Perturb, ValidatesPlanAndResources) {
  EXPECT_THROW(p::apply_perturbations(kTwenty, {{}, 0.1, 0, eng()}, lexicons()), cf::ConfigError);
  EXPECT_THROW(p::apply_perturbations(kTwenty, {{p::Kind::kMask}, 0.9, 0, eng()}, lexicons()),
               cf::ConfigError);
  EXPECT_THROW(p::apply_perturbations(kTwenty, {{p::Kind::kGrammarInflect}, 0.1, 0, eng()},
                                      lexicons(), nullptr),
               cf::ResourceError);
  const auto tel = cf::lang::parse_tag("Dravidian+tel_Telu");
  EXPECT_THROW(p::apply_perturbations("x y", {{p::Kind::kPronounSwap}, 0.1, 0, tel}, lexicons()),
               cf::ResourceError);
  EXPECT_THROW(p::apply_perturbations("  ", {{p::Kind::kSpelling}, 0.1, 0, eng()}, lexicons()),
               cf::ParseError);
}

TEST(Perturb, AvailableKindsFollowResources) {
  EXPECT_EQ(p::available_kinds(eng(), lexicons(), &trie()).size(), p::kAllKinds.size());
  const auto without_trie = p::available_kinds(eng(), lexicons(), nullptr);
  EXPECT_EQ(without_trie.size(), p::kAllKinds.size() - 1);
  const auto tel = cf::lang::parse_tag("Dravidian+tel_Telu");
  EXPECT_EQ(p::available_kinds(tel, lexicons(), nullptr),
            (std::vector<p::Kind>{p::Kind::kSpelling, p::Kind::kWordOrder}));
}

TEST(Perturb, KindNamesRoundTrip) {
  for (p::Kind k : p::kAllKinds) EXPECT_EQ(p::kind_from_name(p::kind_name(k)), k);
  EXPECT_FALSE(p::kind_from_name("shuffle").has_value());
}

TEST(InflectionTrie, SiblingsShareStem) {
  const auto q = trie().query("walked");
  EXPECT_FALSE(q.empty());
  EXPECT_EQ(std::find(q.begin(), q.end(), "walked"), q.end());
  EXPECT_NE(std::find(q.begin(), q.end(), "walking"), q.end());
  EXPECT_TRUE(trie().query("at").empty());
}

TEST(InflectionTrie, FrequencyThenCodePointOrder) {
  const auto t = p::InflectionTrie::build({{"jumps", 5}, {"jumped", 9}, {"jumping", 5}, {"jump", 1}}, 3);
  EXPECT_EQ(t.query("jump"), (std::vector<std::string>{"jumped", "jumping", "jumps"}));
  EXPECT_THROW(p::InflectionTrie::build({}, 3), cf::ConfigError);
}

TEST(Lexicon, WordListIsCaseInsensitive) {
  const auto& lex = *lexicons().find(eng());
  EXPECT_TRUE(lex.pronouns.contains("She"));
  EXPECT_FALSE(lex.pronouns.contains("river"));
  EXPECT_FALSE(lex.pronouns.alternatives("she").empty());
}
