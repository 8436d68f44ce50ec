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

#include "corpusforge/synthetic_tasks.hpp"

namespace cf = corpusforge;
namespace s = corpusforge::synth;
namespace p = corpusforge::perturb;
using cf::corpus::SentencePair;

namespace {

const cf::lang::LanguageTag& eng() {
  static const auto t = cf::lang::parse_tag("WestGermanic+eng_Latn");
  return t;
}

const cf::lang::LanguageTag& hin() {
  static const auto t = cf::lang::parse_tag("CentralIndic+hin_Deva");
  return t;
}

const p::LexiconSet& lexicons() {
  static const auto l = p::LexiconSet::load(std::string(CORPUSFORGE_SOURCE_DIR) + "/data/lexicons",
                                            {eng(), hin()});
  return l;
}

s::PerturbResources res() { return {&lexicons(), nullptr}; }

SentencePair hin_eng() {
  SentencePair pr;
  pr.id = "9";
  pr.src_tag = hin();
  pr.tgt_tag = eng();
  pr.src_text = "वह घर जाता है";
  pr.tgt_text = "she walks to the market and he stays home because it rains";
  return pr;
}

const std::string kE = "WestGermanic+eng_Latn";
const std::string kH = "CentralIndic+hin_Deva";

}  // namespace

TEST(Markup, EscapeRoundTrip) {
  const std::string raw = "a & b <e> c </e> &amp;";
  const auto esc = s::escape_markup(raw);
  EXPECT_EQ(esc, "a &amp; b &lt;e&gt; c &lt;/e&gt; &amp;amp;");
  EXPECT_EQ(s::unescape_markup(esc), raw);
}

TEST(Markup, MarkAndParseSpans) {
  const std::string text = "x & y <e> z w";
  const auto marked = s::mark_token_spans(text, {{1, 2}, {3, 5}});
  EXPECT_EQ(marked, "x <e>&amp;</e> y <e>&lt;e&gt; z</e> w");
  const auto parsed = s::parse_marked(marked);
  EXPECT_EQ(parsed.text, text);
  EXPECT_EQ(parsed.spans, (cf::metrics::SpanSet{{1, 2}, {3, 5}}));
}

TEST(Markup, ParseRejectsBadMarkup) {
  EXPECT_THROW(s::parse_marked("a <e>b <e>c</e></e>"), cf::ParseError);
  EXPECT_THROW(s::parse_marked("a </e>"), cf::ParseError);
  EXPECT_THROW(s::parse_marked("a <e>b"), cf::ParseError);
  EXPECT_THROW(s::parse_marked("a<e></e> b"), cf::ParseError);
  EXPECT_THROW(s::parse_marked("ab<e>c</e>"), cf::ParseError);
}

TEST(Markup, MergeTouchingSpans) {
  EXPECT_EQ(s::merge_spans({{3, 4}, {0, 1}, {1, 2}}), (cf::metrics::SpanSet{{0, 2}, {3, 4}}));
}

TEST(DaScore, Law) {
  s::DAScoreInputs in;
  in.cs = 80;
  in.ep = 10;
  in.tp = 90;
  EXPECT_DOUBLE_EQ(s::synth_da_score(in), 70.0);
  in.ep = 0;
  in.tp = 100;
  EXPECT_DOUBLE_EQ(s::synth_da_score(in), 80.0);
  in.cs = 5;
  in.ep = 40;
  in.tp = 20;
  EXPECT_DOUBLE_EQ(s::synth_da_score(in), 1.0);
  EXPECT_DOUBLE_EQ(s::tp_from_ter(130), 0.0);
  EXPECT_DOUBLE_EQ(s::tp_from_ter(25), 75.0);
}

TEST(DaScore, LiteralVariant) {
  s::DaOptions lit;
  lit.literal_tp = true;
  EXPECT_DOUBLE_EQ(s::da_degradation(10, 90, lit), 50.0);
  EXPECT_DOUBLE_EQ(s::da_degradation(10, 90), 10.0);
}

TEST(Records, TranslationLiteral) {
  SentencePair pr;
  pr.src_tag = eng();
  pr.tgt_tag = cf::lang::parse_tag("Dravidian+tel_Latn");
  pr.src_text = "Light contrast";
  pr.tgt_text = "Laiṭ kāṇṭrāsṭ";
  pr.domain = "Computer science";
  const auto r = s::make_translation_record(pr);
  EXPECT_EQ(cf::corpus::record_to_json(r).dump(),
            "{\"task\":\"Translation$WestGermanic+eng_Latn#Dravidian+tel_Latn\","
            "\"domain\":\"Computer science\",\"input\":{\"WestGermanic+eng_Latn\":\"Light contrast\"},"
            "\"output\":{\"Dravidian+tel_Latn\":\"Laiṭ kāṇṭrāsṭ\"}}");
}

TEST(Records, GrammarRecordKeys) {
  const p::PerturbationPlan plan{{p::Kind::kTokenNoise}, 0.1, 4, eng()};
  const auto r = s::make_grammar_record("she walks to the market", eng(), plan, res());
  ASSERT_TRUE(r.record.has_value());
  EXPECT_EQ(r.record->task, "Correction$Incorrect " + kE + "#" + kE);
  EXPECT_EQ(r.record->input.at(0).first, "Incorrect " + kE);
  EXPECT_EQ(r.record->input.at(0).second, r.perturbed);
  EXPECT_EQ(r.record->output.at(0).first, "Corrected " + kE);
  EXPECT_EQ(std::get<std::string>(r.record->output.at(0).second), "she walks to the market");
}

TEST(Records, ApeAndErrorMarking) {
  const auto pr = hin_eng();
  const p::PerturbationPlan plan{{p::Kind::kPronounSwap}, 0.15, 8, eng()};
  const auto ape = s::make_ape_record(pr, plan, res());
  ASSERT_TRUE(ape.record.has_value());
  EXPECT_EQ(ape.record->task, "Translation post editing$" + kH + "#" + kE);
  EXPECT_EQ(ape.record->input.at(1).second, ape.perturbed);
  EXPECT_EQ(ape.record->output.at(0).first, "post edited " + kE);

  const auto em = s::make_error_mark_and_correct_record(pr, plan, res());
  ASSERT_TRUE(em.record.has_value());
  ASSERT_EQ(em.record->output.size(), 2u);
  EXPECT_EQ(em.record->output[0].first, "error marked " + kE);
  EXPECT_EQ(s::strip_tags(std::get<std::string>(em.record->output[0].second)), em.perturbed);
  EXPECT_EQ(std::get<std::string>(em.record->output[1].second), pr.tgt_text);
}

TEST(Records, RateBandsAreEnforced) {
  const auto pr = hin_eng();
  EXPECT_THROW(s::make_ape_record(pr, {{p::Kind::kSpelling}, 0.3, 1, eng()}, res()), cf::ConfigError);
  EXPECT_THROW(s::make_error_mark_record(pr, {{p::Kind::kSpelling}, 0.01, 1, eng()}, res()),
               cf::ConfigError);
  EXPECT_THROW(s::synthesize_da(pr, {{p::Kind::kSpelling}, 0.02, 1, eng()}, 50, res()),
               cf::ConfigError);
}

TEST(Records, SameTagPairIsSkipped) {
  auto pr = hin_eng();
  pr.src_tag = eng();
  const auto r = s::make_ape_record(pr, {{p::Kind::kSpelling}, 0.1, 1, eng()}, res());
  EXPECT_FALSE(r.record.has_value());
  EXPECT_EQ(r.reason, "source and target tags coincide");
  EXPECT_THROW(s::make_qe_record(pr, "x", 50), cf::ConfigError);
}

TEST(Records, NoEligiblePositionSkips) {
  auto pr = hin_eng();
  pr.tgt_text = "river stone lamp";
  const auto r = s::make_ape_record(pr, {{p::Kind::kPronounSwap}, 0.1, 1, eng()}, res());
  EXPECT_FALSE(r.record.has_value());
  EXPECT_EQ(r.reason, "no eligible position for the requested perturbations");
}

TEST(Records, DaAndQeScores) {
  const auto pr = hin_eng();
  const auto da = s::make_da_record(pr, "gold text", "system text", 78.341844);
  EXPECT_EQ(da.input.at(1).first, "gold " + kE);
  EXPECT_EQ(da.input.at(2).first, "system " + kE);
  EXPECT_DOUBLE_EQ(std::get<double>(da.output.at(0).second), 78.34184);
  EXPECT_EQ(da.output.at(0).first, "direct assessment score out of 100");
  EXPECT_THROW(s::make_da_record(pr, "a", "b", 0.5), cf::ConfigError);
  const auto qe = s::make_qe_record(pr, "sys", 100);
  EXPECT_EQ(qe.output.at(0).first, "quality estimation score out of 100");

  const auto syn = s::synthesize_da(pr, {{p::Kind::kTokenNoise}, 0.2, 3, eng()}, 80, res());
  ASSERT_TRUE(syn.result.record.has_value());
  EXPECT_LT(syn.score, 80.0);
  EXPECT_DOUBLE_EQ(syn.score, s::synth_da_score(syn.inputs));
}
