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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "corpusforge/pipeline.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
namespace cli = corpusforge::cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("corpusforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("ok.tsv", "the boy walks home\tलड़का घर जाता है\t80\nhello there friend\tनमस्ते दोस्त\t75\n");
  }
  void TearDown() override {
    unsetenv("CORPUSFORGE_SCORER_URL");
    fs::remove_all(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name)) << content;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  int run(const std::string& args) const {
    const std::string cmd = std::string(CORPUSFORGE_CLI) + " " + args + " >" + path("stdout") +
                            " 2>" + path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  nlohmann::json manifest() const { return nlohmann::json::parse(read("manifest.json")); }

  std::string tags() const {
    return "--src-tag WestGermanic+eng_Latn --tgt-tag CentralIndic+hin_Deva";
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, VersionAndHelpExitZero) {
  EXPECT_EQ(run("--version"), 0);
  EXPECT_EQ(read("stdout"), std::string(cli::kVersion) + "\n");
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, CleanSucceeds) {
  EXPECT_EQ(run("clean --input " + path("ok.tsv") + " --output " + path("out.tsv") + " " + tags() +
                " --manifest-out " + path("manifest.json")),
            0);
  const auto m = manifest();
  EXPECT_EQ(m["command"], "clean");
  EXPECT_EQ(m["version"], std::string(cli::kVersion));
  // Scores are rewritten in a canonical form.
  EXPECT_EQ(read("out.tsv"),
            "the boy walks home\tलड़का घर जाता है\t80.0\nhello there friend\tनमस्ते दोस्त\t75.0\n");
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("clean --input " + path("ok.tsv") + " " + tags() + " --stages length,nope"), 2);
  EXPECT_EQ(run("clean --input " + path("ok.tsv")), 2);  // TSV needs tags
  EXPECT_EQ(run("clean --no-such-flag 1"), 2);
  EXPECT_EQ(run("clean --input " + path("missing.tsv") + " --src-tag Klingon+tlh_Latn"
                " --tgt-tag CentralIndic+hin_Deva"),
            2);  // rejected before the input is opened
  EXPECT_EQ(run("synth --task ape --input " + path("ok.tsv") +
                " --src-tag WestGermanic+eng_Latn --tgt-tag WestGermanic+eng_Latn"),
            2);
}

TEST_F(CliTest, UnreadableInputExitsOne) {
  EXPECT_EQ(run("clean --input " + path("missing.tsv") + " " + tags()), 1);
}

TEST_F(CliTest, ErrorBudgetExceededExitsOne) {
  write("bad.tsv", "one column\nx\ty\nz\n");
  EXPECT_EQ(run("clean --input " + path("bad.tsv") + " " + tags() + " --stages length"), 1);
  // The same input is accepted under a looser budget.
  EXPECT_EQ(run("clean --input " + path("bad.tsv") + " " + tags() +
                " --stages length --error-budget 0.7"),
            0);
}

TEST_F(CliTest, ConfigPrecedenceFileEnvFlag) {
  write("run.conf",
        "# defaults for this test\n"
        "max-word-delta = 3\n"
        "scorer-url = http://from-file:1/score\n"
        "qe-margin = 7\n");
  const std::string base = "clean --config " + path("run.conf") + " --input " + path("ok.tsv") +
                           " " + tags() + " --stages length --manifest-out " + path("manifest.json");
  ASSERT_EQ(run(base), 0);
  auto c = manifest()["config"];
  EXPECT_EQ(c["max-word-delta"], "3");
  EXPECT_EQ(c["scorer-url"], "http://from-file:1/score");

  setenv("CORPUSFORGE_SCORER_URL", "http://from-env:2/score", 1);
  ASSERT_EQ(run(base + " --qe-margin 4"), 0);
  c = manifest()["config"];
  EXPECT_EQ(c["scorer-url"], "http://from-env:2/score");
  EXPECT_EQ(c["qe-margin"], "4");
  EXPECT_EQ(c["max-word-delta"], "3");

  ASSERT_EQ(run(base + " --scorer-url http://from-flag:3/score"), 0);
  EXPECT_EQ(manifest()["config"]["scorer-url"], "http://from-flag:3/score");
}

TEST_F(CliTest, BadConfigFileExitsTwo) {
  write("bad.conf", "max-word-delta 3\n");
  EXPECT_EQ(run("clean --config " + path("bad.conf") + " --input " + path("ok.tsv") + " " + tags()), 2);
  write("unknown.conf", "colour = blue\n");
  EXPECT_EQ(run("clean --config " + path("unknown.conf") + " --input " + path("ok.tsv") + " " + tags()),
            2);
}

TEST_F(CliTest, SynthGecIsDeterministicAcrossJobs) {
  std::string mono;
  for (int i = 0; i < 40; ++i) mono += "she walked to the market and he stayed home today\n";
  write("mono.txt", mono);
  const std::string base = "synth --task gec --input " + path("mono.txt") +
                           " --src-tag WestGermanic+eng_Latn --seed 17 --lexicons " +
                           std::string(CORPUSFORGE_SOURCE_DIR) + "/data/lexicons";
  ASSERT_EQ(run(base + " --jobs 1 --output " + path("a.jsonl")), 0);
  ASSERT_EQ(run(base + " --jobs 4 --output " + path("b.jsonl")), 0);
  EXPECT_FALSE(read("a.jsonl").empty());
  EXPECT_EQ(read("a.jsonl"), read("b.jsonl"));
}

TEST_F(CliTest, ScoreReportsMetrics) {
  write("hyp.txt", "the cat sat\n");
  write("ref.txt", "the cat sat on the mat\n");
  ASSERT_EQ(run("score --hypotheses " + path("hyp.txt") + " --references " + path("ref.txt") +
                " --manifest-out " + path("manifest.json")),
            0);
  const auto out = read("stdout");
  EXPECT_NE(out.find("bleu"), std::string::npos);
}

TEST(RunConfig, DefaultsAndTypedAccess) {
  cli::RunConfig cfg;
  EXPECT_EQ(cfg.count("max-word-delta"), 10u);
  EXPECT_DOUBLE_EQ(cfg.real("qe-margin"), 10.0);
  EXPECT_TRUE(cfg.flag("use-attached-scores"));
  EXPECT_EQ(cfg.list("stages"),
            (std::vector<std::string>{"length", "language_script", "markup", "qe_score"}));
  EXPECT_FALSE(cfg.optional_real("rate-min").has_value());
  cfg.set("jobs", "x");
  EXPECT_THROW(cfg.integer("jobs"), corpusforge::ConfigError);
  EXPECT_THROW(cfg.set("nope", "1"), corpusforge::ConfigError);
}
