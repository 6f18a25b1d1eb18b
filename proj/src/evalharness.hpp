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
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "classify.hpp"
#include "datagen.hpp"
#include "hierarchy.hpp"

namespace nlapi {

struct PredictionRecord {
  std::string query;
  Label true_label;
  Label pred_label;
  ParamMap params;
  std::string backend_id;
  double latency_ms = 0.0;
  std::optional<std::string> error_flag;
  std::optional<std::int64_t> registry_version;

  nlohmann::json ToJson() const;
  static PredictionRecord FromJson(const nlohmann::json& j);
};

// One JSON object per line. A torn final line is skipped.
std::vector<PredictionRecord> ReadPredictions(const std::filesystem::path& path);
void WritePredictions(const std::filesystem::path& path, const std::vector<PredictionRecord>& preds);

enum class RecordFilter { kAccepted, kNotRejected, kAll };

struct RunOptions {
  int workers = 4;
  RecordFilter filter = RecordFilter::kAccepted;
  // Stop after this many new predictions (0 = no limit). Simulates an
  // interrupted run.
  std::size_t max_new = 0;
};

// Classifies every selected record once, appending to out in dataset order.
// Records already present in out (by query) are skipped. Returns the full
// prediction list in dataset order. A backend failure flags the record and
// predicts the reserved invalid label.
std::vector<PredictionRecord> RunPredictions(const Dataset& dataset, Classifier& classifier,
                                             const std::string& backend_id, const Registry& registry,
                                             const std::filesystem::path& out, const RunOptions& options = {});

// Module-level accuracy over records whose true module equals module_filter,
// or over all records. nullopt for an empty selection.
std::optional<double> MlcAcc(const std::vector<PredictionRecord>& preds,
                             const std::optional<std::string>& module_filter = std::nullopt);

// Function accuracy among module-correct records. nullopt when no record has
// the module right.
std::optional<double> FlcAcc(const std::vector<PredictionRecord>& preds,
                             const std::optional<std::string>& module_filter = std::nullopt);

struct ModuleScore {
  std::size_t n = 0;
  std::size_t module_correct = 0;
  std::size_t both_correct = 0;
  std::optional<double> mlc;
  std::optional<double> flc;
};

struct EvalReport {
  std::string backend_id;
  std::int64_t registry_version = 0;
  std::vector<std::string> module_order;
  std::map<std::string, ModuleScore> modules;
  std::optional<double> mlc_micro;
  std::optional<double> mlc_macro;
  std::optional<double> flc_micro;
  std::optional<double> flc_macro;
  std::size_t n_queries = 0;
  std::size_t n_module_correct = 0;
  std::size_t n_both_correct = 0;
  std::size_t n_errors = 0;
  double mean_latency_ms = 0.0;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);
};

EvalReport BuildReport(const std::string& backend_id, const std::vector<PredictionRecord>& preds,
                       const Registry& registry);

struct ReportSet {
  std::vector<EvalReport> reports;
  std::string table;
  nlohmann::json json;
};

// One report per file. Backend id comes from the records (file stem when
// absent). Throws Error(kInvalidArgument) when files carry different registry
// versions.
ReportSet BuildReportSet(const std::vector<std::filesystem::path>& prediction_files, const Registry& registry);
ReportSet BuildReportSet(const std::vector<EvalReport>& reports);

// Rows = backends, columns = per-module accuracy, both overall aggregations
// and both function-level aggregations, three decimals, then a footnote.
std::string RenderTable(const std::vector<EvalReport>& reports);
extern const char* const kAggregationFootnote;

// Highest micro accuracy; ties go to higher function-level accuracy, then to
// lower mean latency. Throws Error(kInvalidArgument) for an empty list.
std::string SelectBest(const std::vector<EvalReport>& reports);

// {"pool": {"policy": "round_robin", "backends": [spec]}} for the winner.
nlohmann::json PoolConfigFragment(const std::string& backend_id, const std::vector<BackendSpec>& known_specs);

}  // namespace nlapi
