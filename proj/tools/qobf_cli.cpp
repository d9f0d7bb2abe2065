//
// Copyright 2026 The qobf Authors
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
//

// qobf: command-line front end over the C API.
//
//   qobf obfuscate      --config exp.ini [--seed N] [--out DIR] [overrides]
//   qobf privacy-eval   ...
//   qobf retrieval-eval ...
//   qobf sweep          ...
//
// Overrides are either dedicated flags (--epsilon 1,5,10) or generic
// `--set section.key=value` pairs; both win over the config file.

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qobf/qobf.h"

namespace {

struct Options {
  std::string config;
  std::optional<std::string> seed;
  std::optional<std::string> out;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;
  bool oracle = false;
};

// Flag name -> config key.
const std::pair<const char*, const char*> kFlagKeys[] = {
    {"embeddings", "inputs.embeddings"}, {"lexicon", "inputs.lexicon"},
    {"stopwords", "inputs.stopwords"},   {"corpus", "inputs.corpus"},
    {"queries", "inputs.queries"},       {"qrels", "inputs.qrels"},
    {"mechanism", "mechanism.name"},     {"epsilon", "mechanism.epsilon"},
    {"k", "mechanism.k"},                {"n", "mechanism.n"},
    {"measure", "mechanism.measure"},    {"lambda", "mechanism.lambda"},
    {"scorers", "retrieval.scorers"},    {"depth", "retrieval.depth"},
    {"batch", "run.batch"},              {"workers", "run.workers"},
};

void AddCommand(CLI::App& app, const std::string& name, const std::string& help,
                Options& options, std::vector<std::string>& values) {
  auto* cmd = app.add_subcommand(name, help);
  cmd->add_option("--config", options.config, "experiment config file (INI)");
  cmd->add_option("--seed", options.seed, "base seed");
  cmd->add_option("--out", options.out, "output directory");
  cmd->add_option("--set", options.sets, "override, section.key=value")->take_all();
  cmd->add_flag("--oracle", options.oracle,
                "use the brute-force reference implementations (golden files)");
  for (std::size_t i = 0; i < std::size(kFlagKeys); ++i) {
    cmd->add_option(std::string("--") + kFlagKeys[i].first, values[i]);
  }
}

int Report(qobf_status status) {
  std::fprintf(stderr, "qobf: %s: %s\n", qobf_status_name(status), qobf_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query obfuscation experiments"};
  app.set_version_flag("--version", qobf_version());
  app.require_subcommand(1);
  Options options;
  std::vector<std::string> values(std::size(kFlagKeys));
  AddCommand(app, "obfuscate", "write obfuscated replicates of every query", options, values);
  AddCommand(app, "privacy-eval", "Jaccard and semantic similarity tables", options, values);
  AddCommand(app, "retrieval-eval", "pooled recall and nDCG after re-ranking", options, values);
  AddCommand(app, "sweep", "grid over mechanism, epsilon, k, n and measure", options, values);
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  qobf_experiment* experiment = nullptr;
  qobf_status status = options.config.empty()
                           ? qobf_experiment_create(&experiment)
                           : qobf_experiment_load(options.config.c_str(), &experiment);
  if (status != QOBF_OK) return Report(status);

  std::vector<std::pair<std::string, std::string>> overrides;
  for (std::size_t i = 0; i < std::size(kFlagKeys); ++i) {
    if (!values[i].empty()) overrides.emplace_back(kFlagKeys[i].second, values[i]);
  }
  for (const auto& item : options.sets) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "qobf: --set expects section.key=value, got '%s'\n", item.c_str());
      qobf_experiment_free(experiment);
      return 2;
    }
    overrides.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  if (options.seed) overrides.emplace_back("run.seed", *options.seed);
  if (options.out) overrides.emplace_back("run.out", *options.out);
  if (options.oracle) overrides.emplace_back("run.oracle", "true");

  for (const auto& [key, value] : overrides) {
    status = qobf_experiment_set(experiment, key.c_str(), value.c_str());
    if (status != QOBF_OK) {
      qobf_experiment_free(experiment);
      return Report(status);
    }
  }
  size_t skipped = 0;
  status = qobf_experiment_run(experiment, command.c_str(), &skipped);
  qobf_experiment_free(experiment);
  if (status != QOBF_OK) return Report(status);
  if (skipped > 0) std::fprintf(stderr, "qobf: %zu queries skipped (no relevant documents)\n", skipped);
  return 0;
}
