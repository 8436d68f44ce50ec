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

#include <sstream>

#include "corpusforge/corpus_model.hpp"

namespace cf = corpusforge;
using cf::corpus::Format;
using cf::corpus::SentencePair;
using cf::corpus::TaskRecord;

namespace {

cf::corpus::ReaderOptions eng_hin() {
  cf::corpus::ReaderOptions o;
  o.src_tag = cf::lang::parse_tag("WestGermanic+eng_Latn");
  o.tgt_tag = cf::lang::parse_tag("CentralIndic+hin_Deva");
  return o;
}

}  // namespace

TEST(CorpusModel, ReadsTsvWithScoreAndExtras) {
  std::istringstream in("a b\tक ख\t72.5\tx\ty\n\nc\tग\n");
  const auto r = cf::corpus::read_pairs(in, Format::kTsv, eng_hin());
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.pairs[0].id, "1");
  EXPECT_EQ(r.pairs[0].score, 72.5);
  EXPECT_EQ(r.pairs[0].extra, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(r.pairs[1].id, "3");
  EXPECT_FALSE(r.pairs[1].score.has_value());
}

TEST(CorpusModel, MalformedLinesAreReportedNotFatal) {
  std::istringstream in("one column\nok\tfine\nbad\tscore\tzz\n\t\n\xff\xfe\tx\n");
  const auto r = cf::corpus::read_pairs(in, Format::kTsv, eng_hin());
  ASSERT_EQ(r.pairs.size(), 1u);
  ASSERT_EQ(r.errors.size(), 4u);
  EXPECT_EQ(r.errors[0].line, 1u);
  EXPECT_EQ(r.errors[3].message, "invalid UTF-8");
}

TEST(CorpusModel, ScoreOutsideRangeIsMalformed) {
  std::istringstream in("a\tb\t0.5\na\tb\t100\n");
  const auto r = cf::corpus::read_pairs(in, Format::kTsv, eng_hin());
  EXPECT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.errors.size(), 1u);
}

TEST(CorpusModel, JsonlRoundTrip) {
  SentencePair p;
  p.id = "p7";
  p.src_tag = cf::lang::parse_tag("WestGermanic+eng_Latn");
  p.tgt_tag = cf::lang::parse_tag("CentralIndic+hin_Deva");
  p.src_text = "tab\there";
  p.tgt_text = "घर";
  p.score = 61.25;
  p.domain = "news";
  std::stringstream buf;
  cf::corpus::write_pair(buf, p, Format::kJsonl);
  const auto r = cf::corpus::read_pairs(buf, Format::kJsonl, {});
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0], p);
}

TEST(CorpusModel, InputIsNfcNormalized) {
  // "e" + combining acute composes to U+00E9.
  std::istringstream in("caf\x65\xcc\x81\tx\n");
  const auto r = cf::corpus::read_pairs(in, Format::kTsv, eng_hin());
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].src_text, "caf\xc3\xa9");
}

TEST(CorpusModel, TaskStringSplitAndJoin) {
  const auto s = cf::corpus::make_task_string("Translation", "WestGermanic+eng_Latn",
                                              "Dravidian+tel_Latn");
  EXPECT_EQ(s, "Translation$WestGermanic+eng_Latn#Dravidian+tel_Latn");
  const auto parts = cf::corpus::split_task_string(s);
  EXPECT_EQ(parts.name, "Translation");
  EXPECT_EQ(parts.src, "WestGermanic+eng_Latn");
  EXPECT_EQ(parts.tgt, "Dravidian+tel_Latn");
  EXPECT_THROW(cf::corpus::split_task_string("a#b$c"), cf::ParseError);
  EXPECT_THROW(cf::corpus::split_task_string("a$b$c#d"), cf::ParseError);
}

TEST(CorpusModel, RecordWriterValidates) {
  TaskRecord r;
  r.task = "Translation quality estimation$A+x_Latn#B+y_Latn";
  r.input = {{"k", "v"}};
  r.output = {{"score", 150.0}};
  std::ostringstream out;
  cf::corpus::RecordWriter w(out);
  EXPECT_THROW(w.write(r), cf::ParseError);
  r.output = {{"score", 55.5}};
  r.input = {{"k", "v"}, {"k", "w"}};
  EXPECT_THROW(w.write(r), cf::ParseError);
  r.input = {{"k", "v"}};
  w.write(r);
  EXPECT_EQ(w.count(), 1u);
  EXPECT_EQ(out.str(),
            "{\"task\":\"Translation quality estimation$A+x_Latn#B+y_Latn\",\"domain\":\"general\","
            "\"input\":{\"k\":\"v\"},\"output\":{\"score\":55.5}}\n");
}

TEST(CorpusModel, RecordRoundTripKeepsKeyOrder) {
  TaskRecord r;
  r.task = "T$a#b";
  r.input = {{"zeta", "1"}, {"alpha", "2"}};
  r.output = {{"y", std::string("s")}, {"x", 42.0}};
  std::stringstream buf;
  cf::corpus::write_records(std::vector<TaskRecord>{r}, buf);
  const auto back = cf::corpus::read_records(buf);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], r);
}

TEST(CorpusModel, DedupeCollapsesWhitespace) {
  SentencePair a, b, c;
  a.src_text = "a  b";
  a.tgt_text = "c";
  b.src_text = "a b";
  b.tgt_text = " c ";
  c.src_text = "a b";
  c.tgt_text = "d";
  EXPECT_EQ(cf::corpus::dedupe({a, b, c}).size(), 2u);
}
