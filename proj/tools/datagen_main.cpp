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
// datagen: build, review and summarize labelled query datasets.

#include <termios.h>
#include <unistd.h>

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_common.hpp"

using nlapi_cli::CString;
using nlapi_cli::OrNull;
using nlapi_cli::Report;
using nlohmann::json;

namespace {

// Reads one keystroke when stdin is a terminal, otherwise the first character of a line.
int ReadKey() {
  if (!isatty(STDIN_FILENO)) {
    std::string line;
    if (!std::getline(std::cin, line)) return EOF;
    return line.empty() ? '\n' : line[0];
  }
  termios saved{};
  tcgetattr(STDIN_FILENO, &saved);
  termios raw = saved;
  raw.c_lflag &= ~(ICANON | ECHO);
  raw.c_cc[VMIN] = 1;
  raw.c_cc[VTIME] = 0;
  tcsetattr(STDIN_FILENO, TCSANOW, &raw);
  const int c = std::getchar();
  tcsetattr(STDIN_FILENO, TCSANOW, &saved);
  return c;
}

std::string ReadReason() {
  std::fputs("reason (optional): ", stdout);
  std::fflush(stdout);
  std::string line;
  std::getline(std::cin, line);
  return line;
}

int PrintStats(nlapi_review* review) {
  CString stats;
  if (auto st = nlapi_review_stats(review, stats.out()); st != NLAPI_OK) return Report(st);
  std::cout << json::parse(stats.str()).dump(2) << "\n";
  return 0;
}

int Interactive(const std::string& dataset, const std::string& registry) {
  nlapi_review* review = nullptr;
  if (auto st = nlapi_review_open(dataset.c_str(), OrNull(registry), &review); st != NLAPI_OK) return Report(st);
  CString first;
  nlapi_review_stats(review, first.out());
  const json opening = json::parse(first.str());
  if (opening.value("resumed", false)) std::cout << "resuming an interrupted review session\n";
  std::cout << opening.at("remaining").get<long long>() << " records to review\n"
            << "keys: a accept, r reject, s skip, q save and quit\n";

  int64_t index = nlapi_review_next(review);
  bool quit = false;
  while (index >= 0 && !quit) {
    CString rec;
    if (nlapi_review_record(review, index, rec.out()) != NLAPI_OK) break;  // past the last record
    const json r = json::parse(rec.str());
    if (r.at("review") != "unreviewed") {
      ++index;
      continue;
    }
    std::cout << "\n#" << index << "  " << r.at("label")[0].get<std::string>() << "."
              << r.at("label")[1].get<std::string>() << "\n  " << r.at("query").get<std::string>() << "\n> "
              << std::flush;
    const int key = ReadKey();
    std::cout << (key == EOF ? 'q' : static_cast<char>(key)) << "\n";
    nlapi_status st = NLAPI_OK;
    switch (key) {
      case 'a':
      case 'A':
        st = nlapi_review_decide(review, index, 1, nullptr);
        ++index;
        break;
      case 'r':
      case 'R':
        st = nlapi_review_decide(review, index, 0, ReadReason().c_str());
        ++index;
        break;
      case 's':
      case 'S':
        ++index;
        break;
      case 'q':
      case 'Q':
      case EOF:
        quit = true;
        break;
      default:
        std::cout << "unknown key\n";
    }
    if (st != NLAPI_OK) {
      nlapi_review_free(review);
      return Report(st);
    }
  }
  if (auto st = nlapi_review_save(review); st != NLAPI_OK) {
    nlapi_review_free(review);
    return Report(st);
  }
  const int rc = PrintStats(review);
  nlapi_review_free(review);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Labelled query dataset tooling"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  std::string registry, backend = "template", plan, config, out, dataset, decisions;
  uint64_t seed = 0;
  int batch_size = 0;
  bool allow_partial = false;

  auto* gen = app.add_subcommand("generate", "Generate a dataset from a plan");
  gen->add_option("--registry", registry, "Registry file (default: built-in)")->check(CLI::ExistingFile);
  gen->add_option("--backend", backend, "template, or a chat backend id defined in --config");
  gen->add_option("--plan", plan, "Generation plan (default: per-module allocation)")->check(CLI::ExistingFile);
  gen->add_option("--config", config, "File listing backend specs")->check(CLI::ExistingFile);
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--batch-size", batch_size, "Queries requested per call (1-200)");
  gen->add_flag("--allow-partial", allow_partial, "Keep batches that return at least half the requested queries");
  gen->add_option("--out", out, "Dataset output path")->required();

  auto* review = app.add_subcommand("review", "Accept or reject unreviewed records");
  review->add_option("--dataset", dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  review->add_option("--registry", registry, "Registry file (default: built-in)")->check(CLI::ExistingFile);
  review->add_option("--decisions", decisions,
                     "Apply a JSON array of {index, decision, reason} instead of prompting")
      ->check(CLI::ExistingFile);

  auto* stats = app.add_subcommand("stats", "Per-module and per-function counts");
  stats->add_option("--dataset", dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  stats->add_option("--registry", registry, "Registry file (default: built-in)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (auto st = nlapi_set_log_level(log_level.c_str()); st != NLAPI_OK) return Report(st);

  try {
    if (*gen) {
      nlapi_generate_options opts{};
      opts.registry_path = OrNull(registry);
      opts.backend_id = backend.c_str();
      opts.plan_path = OrNull(plan);
      opts.config_path = OrNull(config);
      opts.out_path = out.c_str();
      opts.seed = seed;
      opts.batch_size = batch_size;
      opts.allow_partial = allow_partial ? 1 : 0;
      CString summary;
      if (auto st = nlapi_datagen_generate(&opts, summary.out()); st != NLAPI_OK) return Report(st);
      std::cout << summary.str() << "\n";
      return 0;
    }
    if (*review) {
      if (decisions.empty()) return Interactive(dataset, registry);
      CString result;
      const std::string doc = nlapi_cli::ReadFile(decisions);
      if (auto st = nlapi_review_apply(dataset.c_str(), OrNull(registry), doc.c_str(), result.out()); st != NLAPI_OK) {
        return Report(st);
      }
      std::cout << result.str() << "\n";
      return 0;
    }
    CString summary;
    if (auto st = nlapi_datagen_stats(OrNull(registry), dataset.c_str(), summary.out()); st != NLAPI_OK) {
      return Report(st);
    }
    std::cout << summary.str() << "\n";
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
