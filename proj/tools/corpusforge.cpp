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

// corpusforge command-line tool.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "corpusforge/pipeline.hpp"

namespace {

struct Subcommand {
  const char* name;
  const char* help;
};

constexpr Subcommand kSubcommands[] = {
    {"clean", "filter a parallel corpus"},
    {"perturb", "inject synthetic errors into monolingual text"},
    {"synth", "build task records"},
    {"score", "compute bleu, chrf, ter, span f1 and spearman"},
    {"align", "align two documents sentence by sentence"},
    {"pivot", "derive pairs through a pivot language"},
    {"backtranslate", "iterative back-translation"},
    {"stats", "report corpus statistics"},
};

}  // namespace

int main(int argc, char** argv) {
  using corpusforge::cli::RunConfig;
  CLI::App app{"corpusforge: parallel corpus cleaning, perturbation and task synthesis"};
  app.set_version_flag("--version", std::string(corpusforge::cli::kVersion));
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "config file of key = value lines");
  std::map<std::string, std::string> flags;
  for (const auto& k : corpusforge::cli::kConfigKeys) {
    const std::string key(k.key);
    std::string help(k.help);
    if (!k.default_value.empty()) help += " [" + std::string(k.default_value) + "]";
    app.add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  }
  for (const auto& s : kSubcommands) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    cfg.apply_environment();
    for (const auto& [k, v] : flags) cfg.set(k, v);
  } catch (const corpusforge::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
  return corpusforge::cli::run(cfg, std::cerr).exit_code;
}
