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
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "backends.hpp"
#include "error.hpp"
#include "hierarchy.hpp"
#include "template_grammar.hpp"

namespace nlapi {

enum class RecordSource { kLlm, kTemplate };
enum class ReviewState { kUnreviewed, kAccepted, kRejected };

std::string_view ToString(RecordSource s);
std::string_view ToString(ReviewState s);
ReviewState ParseReviewState(std::string_view s);

// Dataset equality key: case-folded, whitespace-collapsed query text.
std::string DedupKey(std::string_view query);

struct GenerationRule {
  Label target;
  int samples_requested = 1;
  std::vector<std::string> style_directives;
  std::vector<std::string> forbidden_substrings;

  static GenerationRule FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

// Rules per function, allocating each module total evenly with the remainder
// going to the first functions. Throws when a module is missing.
std::vector<GenerationRule> AllocatePlan(const Registry& registry, const std::map<std::string, int>& module_totals);

// calculator 250, routes_not_exist 50, every other module 200.
std::vector<GenerationRule> DefaultPlan(const Registry& registry);

// A plan file is either a JSON array of rules or {"rules": [...]}, or
// {"module_totals": {"calculator": 250, ...}}.
std::vector<GenerationRule> PlanFromJson(const nlohmann::json& j, const Registry& registry);

struct DatasetRecord {
  std::string query;
  Label label;
  RecordSource source = RecordSource::kTemplate;
  std::string batch_id;
  ReviewState review = ReviewState::kUnreviewed;
  std::optional<std::string> rejection_reason;
  std::optional<std::int64_t> registry_version;

  nlohmann::json ToJson() const;
  static DatasetRecord FromJson(const nlohmann::json& j);
  bool operator==(const DatasetRecord&) const = default;
};

struct Dataset {
  std::vector<DatasetRecord> records;
  std::int64_t registry_version = 0;
  std::string created_at;

  // module -> record count; every registry module appears, zero included.
  std::map<std::string, std::size_t> Counts(const Registry& registry) const;
  std::map<std::string, std::size_t> LabelCounts() const;

  // Accepted records in their original order.
  Dataset Accepted() const;

  nlohmann::json ToJson() const;  // array of records
  // Validates label resolution against registry and uniqueness.
  static Dataset FromJson(const nlohmann::json& j, const Registry& registry);
};

// Throws Error(kAssembly) naming the first duplicate or unresolved record.
void ValidateDataset(const Dataset& dataset, const Registry& registry);

void WriteDataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset ReadDataset(const std::filesystem::path& path, const Registry& registry);

// Raised when a batch ends short of batch_size after top-ups. Carries the
// survivors.
class GenerationDegraded : public Error {
 public:
  GenerationDegraded(std::vector<DatasetRecord> partial, std::size_t requested);

  const std::vector<DatasetRecord>& partial() const { return partial_; }
  std::size_t requested() const { return requested_; }
  // At least half of the requested records survived.
  bool usable() const { return 2 * partial_.size() >= requested_; }

 private:
  std::vector<DatasetRecord> partial_;
  std::size_t requested_;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string id() const = 0;
  virtual RecordSource source() const = 0;
  // Up to count candidate queries for rule.target. May repeat itself.
  virtual std::vector<std::string> Generate(const GenerationRule& rule, std::size_t count,
                                            const Registry& registry) = 0;
};

// Expands the template grammar. Each label draws from its own seeded stream,
// so successive calls for one label continue where the last one stopped.
class TemplateGenerationBackend final : public GenerationBackend {
 public:
  TemplateGenerationBackend(std::uint64_t seed, const TemplateGrammar& grammar = TemplateGrammar::Default());

  std::string id() const override { return "template"; }
  RecordSource source() const override { return RecordSource::kTemplate; }
  std::vector<std::string> Generate(const GenerationRule& rule, std::size_t count, const Registry& registry) override;

 private:
  std::uint64_t seed_;
  const TemplateGrammar& grammar_;
  std::map<std::string, Rng> streams_;
};

// One chat-completions call per Generate().
class ChatGenerationBackend final : public GenerationBackend {
 public:
  static constexpr double kTemperature = 0.9;

  ChatGenerationBackend(BackendSpec spec, std::shared_ptr<ChatTransport> transport);

  std::string id() const override { return spec_.id; }
  RecordSource source() const override { return RecordSource::kLlm; }
  std::vector<std::string> Generate(const GenerationRule& rule, std::size_t count, const Registry& registry) override;

  static ChatRequest BuildRequest(const BackendSpec& spec, const GenerationRule& rule, std::size_t count,
                                  const Registry& registry);

 private:
  BackendSpec spec_;
  std::shared_ptr<ChatTransport> transport_;
};

// Strings of the first JSON array in a model reply. Non-strings are skipped.
std::vector<std::string> ParseQueryArray(std::string_view content);

inline constexpr int kDefaultBatchSize = 100;
inline constexpr int kMaxBatchSize = 200;
inline constexpr int kMaxTopUps = 3;

// Requests batch_size queries for rule.target, drops blanks, duplicates
// (within the batch and against exclude) and forbidden-substring hits, and
// tops up the shortfall at most kMaxTopUps times. Returns exactly batch_size
// records or throws GenerationDegraded.
std::vector<DatasetRecord> GenerateBatch(const GenerationRule& rule, GenerationBackend& backend,
                                         const Registry& registry, int batch_size = kDefaultBatchSize,
                                         const std::string& batch_id = {},
                                         const std::unordered_set<std::string>* exclude = nullptr);

// Templates only: n records straight from the grammar, no top-ups.
std::vector<DatasetRecord> TemplateGenerate(const GenerationRule& rule, const TemplateGrammar& grammar,
                                            std::uint64_t seed, std::size_t n);

// Merges batches, keeps the first occurrence of each query and stamps the
// registry version. Throws Error(kAssembly) for a record whose label does not
// resolve or that carries another registry version.
Dataset AssembleDataset(const std::vector<std::vector<DatasetRecord>>& batches, const Registry& registry);

struct PlanOptions {
  int batch_size = kDefaultBatchSize;
  bool allow_partial = false;  // accept degraded batches that kept at least half
};

// Runs every rule in batches of at most batch_size, deduplicating against
// everything generated so far.
Dataset RunPlan(const std::vector<GenerationRule>& plan, GenerationBackend& backend, const Registry& registry,
                const PlanOptions& options = {});

struct ReviewDecision {
  std::size_t index = 0;
  bool accept = true;
  std::string reason;
};

struct ReviewStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::optional<double> acceptance_rate() const;
  nlohmann::json ToJson() const;
};

// Applies decisions atomically: nothing changes if any index is out of range
// (kInvalidArgument) or decided twice (kDuplicateDecision).
ReviewStats ReviewSession(Dataset& dataset, const std::vector<ReviewDecision>& decisions);

// Review state of the whole dataset.
ReviewStats ReviewTotals(const Dataset& dataset);

// Append-only decision log kept next to a dataset while it is being reviewed.
class ReviewJournal {
 public:
  static std::filesystem::path PathFor(const std::filesystem::path& dataset_path);

  explicit ReviewJournal(std::filesystem::path path);

  // Re-applies logged decisions whose query still matches the record at the
  // logged index. Returns the number applied.
  std::size_t Replay(Dataset& dataset) const;

  // Appends and flushes one decision.
  void Append(const ReviewDecision& decision, const DatasetRecord& record);

  void Remove();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

// Interactive-style review over a dataset file. Decisions go to the journal
// first; Save() writes the dataset and drops the journal.
class ReviewCursor {
 public:
  ReviewCursor(std::filesystem::path dataset_path, const Registry& registry);

  std::optional<std::size_t> NextUnreviewed() const;
  const DatasetRecord& record(std::size_t index) const { return dataset_.records.at(index); }
  const Dataset& dataset() const { return dataset_; }
  std::size_t resumed() const { return resumed_; }

  void Decide(const ReviewDecision& decision);
  const ReviewStats& session_stats() const { return session_; }
  void Save();

 private:
  std::filesystem::path path_;
  Dataset dataset_;
  ReviewJournal journal_;
  std::vector<bool> decided_;
  ReviewStats session_;
  std::size_t resumed_ = 0;
};

// Summary used by `datagen stats`.
nlohmann::json DatasetStatsJson(const Dataset& dataset, const Registry& registry);

}  // namespace nlapi
