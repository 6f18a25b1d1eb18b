// Copyright 2026 The nlapi Authors
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
// eval: run a backend over a dataset, score prediction files, pick a winner.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_common.hpp"

using nlapi_cli::CString;
using nlapi_cli::OrNull;
using nlapi_cli::Report;

int main(int argc, char** argv) {
  CLI::App app{"Classification backend evaluation"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  std::string dataset, registry, backend, config, out, records = "accepted", format = "table", emit;
  std::vector<std::string> preds;
  int workers = 4;

  auto* run = app.add_subcommand("run", "Classify every dataset record and append predictions");
  run->add_option("--dataset", dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  run->add_option("--backend", backend, "mock, or a backend id defined in --config")->required();
  run->add_option("--config", config, "File listing backend specs")->check(CLI::ExistingFile);
  run->add_option("--registry", registry, "Registry file (default: built-in)")->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Concurrent requests")->check(CLI::Range(1, 256));
  run->add_option("--records", records, "Which records to run")
      ->check(CLI::IsMember({"accepted", "not_rejected", "all"}));
  run->add_option("--out", out, "Prediction file (resumed if present)")->required();

  auto* score = app.add_subcommand("score", "Accuracy tables from prediction files");
  score->add_option("--pred", preds, "Prediction file, one per backend")->required()->check(CLI::ExistingFile);
  score->add_option("--registry", registry, "Registry file (default: built-in)")->check(CLI::ExistingFile);
  score->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

  auto* select = app.add_subcommand("select", "Pick the best backend");
  select->add_option("--pred", preds, "Prediction file, one per backend")->required()->check(CLI::ExistingFile);
  select->add_option("--registry", registry, "Registry file (default: built-in)")->check(CLI::ExistingFile);
  select->add_option("--config", config, "File listing backend specs")->check(CLI::ExistingFile);
  select->add_option("--emit-pool-config", emit, "Write a single-backend pool fragment here");

  CLI11_PARSE(app, argc, argv);
  if (auto st = nlapi_set_log_level(log_level.c_str()); st != NLAPI_OK) return Report(st);

  try {
    if (*run) {
      nlapi_eval_options opts{};
      opts.dataset_path = dataset.c_str();
      opts.registry_path = OrNull(registry);
      opts.backend_id = backend.c_str();
      opts.config_path = OrNull(config);
      opts.out_path = out.c_str();
      opts.workers = workers;
      opts.records = records.c_str();
      CString summary;
      if (auto st = nlapi_eval_run(&opts, summary.out()); st != NLAPI_OK) return Report(st);
      std::cout << summary.str() << "\n";
      return 0;
    }
    std::vector<const char*> paths;
    for (const auto& p : preds) paths.push_back(p.c_str());
    if (*score) {
      CString text;
      if (auto st = nlapi_eval_score(paths.data(), paths.size(), OrNull(registry), format.c_str(), text.out());
          st != NLAPI_OK) {
        return Report(st);
      }
      std::cout << text.str();
      if (format == "json") std::cout << "\n";
      return 0;
    }
    CString winner, fragment;
    if (auto st = nlapi_eval_select(paths.data(), paths.size(), OrNull(registry), OrNull(config), winner.out(),
                                    fragment.out());
        st != NLAPI_OK) {
      return Report(st);
    }
    std::cout << winner.str() << "\n";
    if (!emit.empty()) nlapi_cli::WriteFile(emit, fragment.str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
