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

#include <atomic>
#include <filesystem>
#include <thread>

#include "corpusforge/http_backends.hpp"
#include "corpusforge/orchestrator.hpp"
#include "corpusforge/parallel.hpp"

namespace cf = corpusforge;
namespace a = corpusforge::augment;
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
const cf::lang::LanguageTag& mar() {
  static const auto t = cf::lang::parse_tag("Maharashtri+mar_Deva");
  return t;
}
const cf::lang::LanguageTag& ben() {
  static const auto t = cf::lang::parse_tag("Magadhi+ben_Beng");
  return t;
}

}  // namespace

TEST(Parallel, OrderIsPreserved) {
  std::vector<int> in(1000);
  for (int i = 0; i < 1000; ++i) in[static_cast<std::size_t>(i)] = i;
  const auto out = cf::parallel_map(in, 8, [](int x) { return x * x; });
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(out[static_cast<std::size_t>(i)], i * i);
}

TEST(Align, BandCells) {
  // n = m = 4, band 1: |j - i| <= 1.
  EXPECT_EQ(a::band_cells(4, 4, 1).size(), 10u);
  // n = 2, m = 4, band 0: j * 2 == i * 4.
  EXPECT_EQ(a::band_cells(2, 4, 0),
            (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 2}}));
}

TEST(Align, GreedyMonotoneMatching) {
  const std::vector<a::AlignedPair> cells{{0, 0, 60}, {0, 1, 90}, {1, 0, 95}, {1, 1, 70}, {2, 2, 40}};
  // 95 at (1,0) first; (0,1) crosses it; (0,0) shares column 0; (1,1) shares row 1.
  EXPECT_EQ(a::greedy_monotone_matching(cells, 50), (std::vector<a::AlignedPair>{{1, 0, 95}}));
  EXPECT_EQ(a::greedy_monotone_matching(cells, 0),
            (std::vector<a::AlignedPair>{{1, 0, 95}, {2, 2, 40}}));
  // Ties go to the smaller (i, j).
  EXPECT_EQ(a::greedy_monotone_matching({{1, 0, 50}, {0, 1, 50}}, 0),
            (std::vector<a::AlignedPair>{{0, 1, 50}}));
}

TEST(Align, EndToEndWithTableScorer) {
  a::TableScorer scorer({{{"a", "A"}, 90}, {{"b", "B"}, 80}, {{"c", "C"}, 85}}, 5);
  const auto m = a::align_sentences({"a", "b", "c"}, {"A", "B", "C"}, scorer, eng(), hin());
  EXPECT_EQ(m, (std::vector<a::AlignedPair>{{0, 0, 90}, {1, 1, 80}, {2, 2, 85}}));
}

TEST(Pivot, KeepsPairsAtOrAboveGroupMean) {
  std::vector<SentencePair> pairs;
  const auto add = [&](const std::string& id, const cf::lang::LanguageTag& other, double score) {
    SentencePair p;
    p.id = id;
    p.src_tag = eng();
    p.tgt_tag = other;
    p.src_text = "pivot " + id;
    p.tgt_text = std::to_string(score);
    pairs.push_back(p);
  };
  add("1", hin(), 60);
  add("2", hin(), 80);
  add("3", hin(), 70);  // mean 70
  add("4", mar(), 10);
  add("5", mar(), 30);  // mean 20
  a::FunctionTranslator tr([](const std::string& t, const auto&, const auto&) { return "T:" + t; });
  a::FunctionScorer sc([](const std::string& other, const std::string&) { return std::stod(other); });
  a::PivotOptions opt;
  opt.batches.batch_size = 2;
  const auto r = a::pivot_translate(pairs, eng(), ben(), tr, sc, opt);
  ASSERT_EQ(r.pairs.size(), 3u);
  EXPECT_EQ(r.pairs[0].id, "2");
  EXPECT_EQ(r.pairs[1].id, "3");
  EXPECT_EQ(r.pairs[2].id, "5");
  EXPECT_EQ(r.pairs[0].src_tag, hin());
  EXPECT_EQ(r.pairs[0].tgt_tag, ben());
  EXPECT_EQ(r.pairs[0].tgt_text, "T:pivot 2");
  EXPECT_EQ(r.pairs[0].provenance, cf::corpus::Provenance::kPivot);
  ASSERT_EQ(r.thresholds.size(), 2u);
  EXPECT_DOUBLE_EQ(r.thresholds[0].mean, 70.0);
  EXPECT_DOUBLE_EQ(r.thresholds[1].mean, 20.0);
}

TEST(Pivot, CheckpointResumes) {
  const auto path = std::filesystem::temp_directory_path() / "corpusforge_pivot_ckpt.jsonl";
  std::filesystem::remove(path);
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 10; ++i) {
    SentencePair p;
    p.id = std::to_string(i);
    p.src_tag = hin();
    p.tgt_tag = eng();
    p.src_text = "other " + std::to_string(i);
    p.tgt_text = "pivot " + std::to_string(i);
    pairs.push_back(p);
  }
  std::atomic<int> calls{0};
  a::FunctionTranslator tr([&](const std::string& t, const auto&, const auto&) {
    ++calls;
    return t;
  });
  a::FunctionScorer sc([](const std::string& o, const std::string&) {
    return 10.0 * (o.back() - '0');
  });
  a::PivotOptions opt;
  opt.batches.batch_size = 3;
  opt.checkpoint = path;
  const auto first = a::pivot_translate(pairs, eng(), ben(), tr, sc, opt);
  EXPECT_EQ(calls.load(), 10);
  EXPECT_EQ(first.resumed_batches, 0u);
  const auto second = a::pivot_translate(pairs, eng(), ben(), tr, sc, opt);
  EXPECT_EQ(calls.load(), 10);
  EXPECT_EQ(second.resumed_batches, 4u);
  EXPECT_EQ(first.pairs, second.pairs);
  std::filesystem::remove(path);
}

TEST(BackTranslate, FailedRoundIsSkipped) {
  const std::vector<std::string> mono{"x", "y"};
  const a::TranslatorFactory factory = [](std::size_t r) -> std::shared_ptr<a::TranslatorClient> {
    if (r == 1) return nullptr;
    return std::make_shared<a::FunctionTranslator>(
        [r](const std::string& t, const auto&, const auto&) { return t + std::to_string(r); });
  };
  a::FunctionScorer sc([](const std::string& t, const std::string&) {
    return t.back() == '2' ? 90.0 : 50.0;
  });
  a::BtOptions opt;
  opt.rounds = 3;
  const auto r = a::iterative_back_translate(mono, hin(), eng(), factory, sc, opt);
  EXPECT_EQ(r.state.iteration, 3u);
  EXPECT_TRUE(r.state.audit[1].failed);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].src_text, "x2");
  EXPECT_EQ(r.pairs[0].tgt_text, "x");
  EXPECT_EQ(r.pairs[0].src_tag, eng());
  EXPECT_EQ(r.pairs[0].id, "1");
}

TEST(BackTranslate, ParagraphsKeepSentenceOrder) {
  std::vector<cf::corpus::Passage> passages(2);
  passages[0] = {"p1", hin(), {"a", "b"}, "general"};
  passages[1] = {"p2", mar(), {"c"}, "general"};
  auto tr = std::make_shared<a::FunctionTranslator>(
      [](const std::string& t, const auto&, const auto&) { return t + "!"; });
  a::LengthRatioScorer sc;
  a::BtOptions opt;
  opt.rounds = 2;
  const auto r = a::paragraph_back_translate(passages, eng(), a::fixed_translator(tr), sc, opt);
  ASSERT_EQ(r.passages.size(), 2u);
  EXPECT_EQ(r.passages[0].sentences, (std::vector<std::string>{"a!", "b!"}));
  EXPECT_EQ(r.passages[1].sentences, (std::vector<std::string>{"c!"}));
  EXPECT_TRUE(r.incomplete.empty());
}

class HttpBackendTest : public ::testing::Test {
 protected:
  void SetUp() override {
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    server_.Post("/translate", [this](const httplib::Request& req, httplib::Response& res) {
      if (++translate_calls_ <= failures_) {
        res.status = 503;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json out;
      out["texts"] = nlohmann::json::array();
      for (const auto& t : body.at("texts")) out["texts"].push_back(t.get<std::string>() + "@" +
                                                                    body.at("tgt").get<std::string>());
      res.set_content(out.dump(), "application/json");
    });
    server_.Post("/score", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json out;
      out["scores"] = nlohmann::json::array();
      for (const auto& p : body.at("pairs")) out["scores"].push_back(p[0].get<std::string>().size());
      res.set_content(out.dump(), "application/json");
    });
    server_.Post("/bad", [](const httplib::Request&, httplib::Response& res) { res.status = 400; });
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  a::HttpOptions fast() const {
    a::HttpOptions o;
    o.timeout = std::chrono::milliseconds(2000);
    o.initial_backoff = std::chrono::milliseconds(1);
    return o;
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> translate_calls_{0};
  int failures_ = 0;
};

TEST_F(HttpBackendTest, RetriesServerErrors) {
  failures_ = 2;
  a::HttpTranslator tr(url("/translate"), fast());
  const auto out = tr.translate({"a", "b"}, eng(), hin());
  EXPECT_EQ(out, (std::vector<std::string>{"a@CentralIndic+hin_Deva", "b@CentralIndic+hin_Deva"}));
  EXPECT_EQ(translate_calls_.load(), 3);
}

TEST_F(HttpBackendTest, GivesUpAfterMaxAttempts) {
  failures_ = 100;
  auto opt = fast();
  opt.max_attempts = 3;
  a::HttpTranslator tr(url("/translate"), opt);
  EXPECT_THROW(tr.translate({"a"}, eng(), hin()), cf::BackendError);
  EXPECT_EQ(translate_calls_.load(), 3);
}

TEST_F(HttpBackendTest, ClientErrorIsNotRetried) {
  a::HttpScorer sc(url("/bad"), fast());
  EXPECT_THROW(sc.score({{"a", "b"}}, eng(), hin()), cf::BackendError);
}

TEST_F(HttpBackendTest, ScorerRoundTrip) {
  a::HttpScorer sc(url("/score"), fast());
  EXPECT_EQ(sc.score({{"abc", "x"}, {"a", "y"}}, eng(), hin()), (std::vector<double>{3, 1}));
}

TEST(HttpEndpoint, ParsesUrls) {
  const auto e = a::parse_endpoint("http://localhost:8080/v1/score");
  EXPECT_EQ(e.base, "http://localhost:8080");
  EXPECT_EQ(e.path, "/v1/score");
  EXPECT_EQ(a::parse_endpoint("http://h").path, "/");
  EXPECT_THROW(a::parse_endpoint("ftp://h/x"), cf::ConfigError);
}
