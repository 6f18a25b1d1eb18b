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
#include "datagen.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "clock.hpp"
#include "text.hpp"
#include "values.hpp"

namespace nlapi {

using nlohmann::json;

std::string_view ToString(RecordSource s) { return s == RecordSource::kLlm ? "llm" : "template"; }

std::string_view ToString(ReviewState s) {
  switch (s) {
    case ReviewState::kUnreviewed: return "unreviewed";
    case ReviewState::kAccepted: return "accepted";
    case ReviewState::kRejected: return "rejected";
  }
  return "unreviewed";
}

ReviewState ParseReviewState(std::string_view s) {
  if (s == "unreviewed") return ReviewState::kUnreviewed;
  if (s == "accepted") return ReviewState::kAccepted;
  if (s == "rejected") return ReviewState::kRejected;
  throw Error(ErrorCode::kMalformedDocument, "unknown review state '" + std::string(s) + "'");
}

std::string DedupKey(std::string_view query) { return text::NormalizeQuery(query); }

namespace {

Label ParseLabelJson(const json& j, const std::string& where) {
  if (j.is_array() && j.size() == 2 && j[0].is_string() && j[1].is_string()) {
    return {j[0].get<std::string>(), j[1].get<std::string>()};
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto dot = s.find('.');
    if (dot != std::string::npos) return {s.substr(0, dot), s.substr(dot + 1)};
  }
  throw Error(ErrorCode::kMalformedDocument, where + ": label must be [module, function]");
}

std::string ContainsForbidden(std::string_view query, const std::vector<std::string>& forbidden) {
  const std::string lowered = text::ToLower(query);
  for (const auto& f : forbidden) {
    if (!f.empty() && lowered.find(text::ToLower(f)) != std::string::npos) return f;
  }
  return {};
}

}  // namespace

GenerationRule GenerationRule::FromJson(const json& j) {
  GenerationRule r;
  try {
    r.target = ParseLabelJson(j.at("target"), "rule");
    r.samples_requested = j.at("samples_requested").get<int>();
    r.style_directives = j.value("style_directives", std::vector<std::string>{});
    r.forbidden_substrings = j.value("forbidden_substrings", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("invalid generation rule: ") + e.what());
  }
  if (r.samples_requested < 1) {
    throw Error(ErrorCode::kInvalidArgument, "rule " + r.target.ToString() + ": samples_requested must be >= 1");
  }
  return r;
}

json GenerationRule::ToJson() const {
  return {{"target", json::array({target.module, target.function})},
          {"samples_requested", samples_requested},
          {"style_directives", style_directives},
          {"forbidden_substrings", forbidden_substrings}};
}

std::vector<GenerationRule> AllocatePlan(const Registry& registry, const std::map<std::string, int>& module_totals) {
  std::vector<GenerationRule> plan;
  for (const auto& [module_name, total] : module_totals) {
    if (!registry.FindModule(module_name)) {
      throw Error(ErrorCode::kInvalidArgument, "plan names unknown module '" + module_name + "'");
    }
    if (total < 0) throw Error(ErrorCode::kInvalidArgument, "negative total for module " + module_name);
  }
  for (const auto& module : registry.modules()) {
    auto it = module_totals.find(module.name);
    if (it == module_totals.end() || it->second == 0) continue;
    const int n = static_cast<int>(module.functions.size());
    const int base = it->second / n;
    const int extra = it->second % n;
    for (int i = 0; i < n; ++i) {
      const int count = base + (i < extra ? 1 : 0);
      if (count == 0) continue;
      GenerationRule rule;
      rule.target = {module.name, module.functions[static_cast<std::size_t>(i)].name};
      rule.samples_requested = count;
      plan.push_back(std::move(rule));
    }
  }
  return plan;
}

std::vector<GenerationRule> DefaultPlan(const Registry& registry) {
  std::map<std::string, int> totals;
  for (const auto& m : registry.modules()) {
    if (m.name == "calculator") {
      totals[m.name] = 250;
    } else if (m.name == kInvalidModule) {
      totals[m.name] = 50;
    } else {
      totals[m.name] = 200;
    }
  }
  return AllocatePlan(registry, totals);
}

std::vector<GenerationRule> PlanFromJson(const json& j, const Registry& registry) {
  std::vector<GenerationRule> plan;
  if (j.is_object() && j.contains("module_totals")) {
    try {
      return AllocatePlan(registry, j.at("module_totals").get<std::map<std::string, int>>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("invalid module_totals: ") + e.what());
    }
  }
  const json& rules = j.is_object() && j.contains("rules") ? j.at("rules") : j;
  if (!rules.is_array()) throw Error(ErrorCode::kInvalidArgument, "plan must be an array of rules");
  for (const auto& r : rules) {
    GenerationRule rule = GenerationRule::FromJson(r);
    auto resolved = ValidateLabel(rule.target, registry);
    if (!resolved) throw Error(ErrorCode::kInvalidArgument, "plan target " + rule.target.ToString() + " is not registered");
    rule.target = *resolved;
    plan.push_back(std::move(rule));
  }
  return plan;
}

json DatasetRecord::ToJson() const {
  json j = {{"query", query},
            {"label", json::array({label.module, label.function})},
            {"source", std::string(ToString(source))},
            {"batch_id", batch_id},
            {"review", std::string(ToString(review))}};
  if (rejection_reason) j["rejection_reason"] = *rejection_reason;
  if (registry_version) j["registry_version"] = *registry_version;
  return j;
}

DatasetRecord DatasetRecord::FromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kMalformedDocument, "dataset record must be an object");
  DatasetRecord r;
  try {
    r.query = j.at("query").get<std::string>();
    r.label = ParseLabelJson(j.at("label"), "record");
    const std::string source = j.value("source", std::string("template"));
    if (source == "llm") {
      r.source = RecordSource::kLlm;
    } else if (source == "template") {
      r.source = RecordSource::kTemplate;
    } else {
      throw Error(ErrorCode::kMalformedDocument, "unknown source '" + source + "'");
    }
    r.batch_id = j.value("batch_id", std::string());
    r.review = ParseReviewState(j.value("review", std::string("unreviewed")));
    if (j.contains("rejection_reason") && !j.at("rejection_reason").is_null()) {
      r.rejection_reason = j.at("rejection_reason").get<std::string>();
    }
    if (j.contains("registry_version")) r.registry_version = j.at("registry_version").get<std::int64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("bad dataset record: ") + e.what());
  }
  if (text::Trim(r.query).empty()) throw Error(ErrorCode::kMalformedDocument, "dataset record has an empty query");
  return r;
}

std::map<std::string, std::size_t> Dataset::Counts(const Registry& registry) const {
  std::map<std::string, std::size_t> counts;
  for (const auto& m : registry.modules()) counts[m.name] = 0;
  for (const auto& r : records) ++counts[r.label.module];
  return counts;
}

std::map<std::string, std::size_t> Dataset::LabelCounts() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) ++counts[r.label.ToString()];
  return counts;
}

Dataset Dataset::Accepted() const {
  Dataset out{{}, registry_version, created_at};
  for (const auto& r : records) {
    if (r.review == ReviewState::kAccepted) out.records.push_back(r);
  }
  return out;
}

json Dataset::ToJson() const {
  json arr = json::array();
  for (const auto& r : records) {
    json j = r.ToJson();
    j["registry_version"] = registry_version;
    arr.push_back(std::move(j));
  }
  return arr;
}

void ValidateDataset(const Dataset& dataset, const Registry& registry) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    const std::string where = "record " + std::to_string(i) + " (\"" + r.query + "\")";
    if (r.registry_version && *r.registry_version != registry.version()) {
      throw Error(ErrorCode::kAssembly, where + " was labeled against registry version " +
                                            std::to_string(*r.registry_version) + ", expected " +
                                            std::to_string(registry.version()));
    }
    if (!registry.FindFunction(r.label)) {
      throw Error(ErrorCode::kAssembly, where + " has label " + r.label.ToString() + " not in registry version " +
                                            std::to_string(registry.version()));
    }
    if (!seen.insert(DedupKey(r.query)).second) throw Error(ErrorCode::kAssembly, where + " duplicates an earlier query");
  }
}

Dataset Dataset::FromJson(const json& j, const Registry& registry) {
  if (!j.is_array()) throw Error(ErrorCode::kMalformedDocument, "dataset must be a JSON array of records");
  Dataset d;
  d.registry_version = registry.version();
  for (const auto& item : j) d.records.push_back(DatasetRecord::FromJson(item));
  ValidateDataset(d, registry);
  for (auto& r : d.records) r.registry_version.reset();
  return d;
}

void WriteDataset(const std::filesystem::path& path, const Dataset& dataset) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << dataset.ToJson().dump(2) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot replace " + path.string() + ": " + ec.message());
}

Dataset ReadDataset(const std::filesystem::path& path, const Registry& registry) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dataset " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, "dataset " + path.string() + " is not valid JSON: " + e.what());
  }
  return Dataset::FromJson(j, registry);
}

GenerationDegraded::GenerationDegraded(std::vector<DatasetRecord> partial, std::size_t requested)
    : Error(ErrorCode::kGenerationDegraded, "generation degraded: " + std::to_string(partial.size()) + " of " +
                                                std::to_string(requested) + " queries survived"),
      partial_(std::move(partial)),
      requested_(requested) {}

TemplateGenerationBackend::TemplateGenerationBackend(std::uint64_t seed, const TemplateGrammar& grammar)
    : seed_(seed), grammar_(grammar) {}

std::vector<std::string> TemplateGenerationBackend::Generate(const GenerationRule& rule, std::size_t count,
                                                             const Registry&) {
  grammar_.Frames(rule.target);
  auto it = streams_.find(rule.target.ToString());
  if (it == streams_.end()) {
    it = streams_.emplace(rule.target.ToString(), Rng(TemplateGrammar::LabelSeed(seed_, rule.target))).first;
  }
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(grammar_.Sample(rule.target, it->second));
  return out;
}

ChatGenerationBackend::ChatGenerationBackend(BackendSpec spec, std::shared_ptr<ChatTransport> transport)
    : spec_(std::move(spec)), transport_(std::move(transport)) {}

ChatRequest ChatGenerationBackend::BuildRequest(const BackendSpec& spec, const GenerationRule& rule, std::size_t count,
                                                const Registry& registry) {
  const ApiFunction* fn = registry.FindFunction(rule.target);
  std::string signature = rule.target.ToString() + "(";
  if (fn) {
    for (std::size_t i = 0; i < fn->params.size(); ++i) {
      if (i) signature += ", ";
      signature += fn->params[i].name + (fn->params[i].required ? "" : "?");
    }
  }
  signature += ")";

  std::string user = "Target API function: " + signature;
  if (fn && !fn->description.empty()) user += "\nWhat it does: " + fn->description;
  user += "\n\nWrite exactly " + std::to_string(count) +
          " distinct requests that a user could type to an assistant and that this function should handle.";
  user += "\nUse different wordings, tones, lengths and everyday situations. Include concrete argument values "
          "where the function takes arguments.";
  user += "\nDo not name the module or the function in the requests.";
  if (!rule.style_directives.empty()) {
    user += "\nStyle hints:";
    for (const auto& s : rule.style_directives) user += "\n- " + s;
  }
  if (!rule.forbidden_substrings.empty()) {
    user += "\nNever use these strings:";
    for (const auto& s : rule.forbidden_substrings) user += "\n- " + s;
  }
  user += "\n\nAnswer with only a JSON array of " + std::to_string(count) + " strings.";

  ChatRequest req;
  req.model = spec.model_name;
  req.temperature = kTemperature;
  req.max_tokens = static_cast<int>(std::min<std::size_t>(16000, 64 * count + 256));
  req.messages = {{"system", "You write realistic user requests for testing an API routing assistant."},
                  {"user", std::move(user)}};
  return req;
}

std::vector<std::string> ChatGenerationBackend::Generate(const GenerationRule& rule, std::size_t count,
                                                         const Registry& registry) {
  const std::string content = CompleteWithRetry(*transport_, BuildRequest(spec_, rule, count, registry), spec_);
  std::vector<std::string> out = ParseQueryArray(content);
  if (out.empty()) spdlog::warn("backend {} returned no usable array for {}", spec_.id, rule.target.ToString());
  return out;
}

std::vector<std::string> ParseQueryArray(std::string_view content) {
  std::vector<std::string> out;
  auto collect = [&out](const json& arr) {
    for (const auto& item : arr) {
      if (item.is_string()) out.push_back(item.get<std::string>());
    }
  };
  json parsed = json::parse(content, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_array()) {
    collect(parsed);
    return out;
  }
  const auto open = content.find('[');
  const auto close = content.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) return out;
  parsed = json::parse(content.substr(open, close - open + 1), nullptr, false);
  if (!parsed.is_discarded() && parsed.is_array()) collect(parsed);
  return out;
}

std::vector<DatasetRecord> GenerateBatch(const GenerationRule& rule, GenerationBackend& backend,
                                         const Registry& registry, int batch_size, const std::string& batch_id,
                                         const std::unordered_set<std::string>* exclude) {
  if (batch_size < 1 || batch_size > kMaxBatchSize) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be in [1, " + std::to_string(kMaxBatchSize) + "]");
  }
  auto target = ValidateLabel(rule.target, registry);
  if (!target) throw Error(ErrorCode::kInvalidArgument, "rule target " + rule.target.ToString() + " is not registered");

  const std::size_t want = static_cast<std::size_t>(batch_size);
  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> seen;
  std::size_t dropped_forbidden = 0;
  for (int call = 0; call <= kMaxTopUps && records.size() < want; ++call) {
    const std::size_t shortfall = want - records.size();
    for (auto& candidate : backend.Generate(rule, shortfall, registry)) {
      if (records.size() >= want) break;
      std::string q = text::CollapseWhitespace(text::SanitizeUtf8(candidate));
      if (q.empty()) continue;
      if (!ContainsForbidden(q, rule.forbidden_substrings).empty()) {
        ++dropped_forbidden;
        continue;
      }
      const std::string key = DedupKey(q);
      if ((exclude && exclude->count(key)) || !seen.insert(key).second) continue;
      DatasetRecord r;
      r.query = std::move(q);
      r.label = *target;
      r.source = backend.source();
      r.batch_id = batch_id;
      records.push_back(std::move(r));
    }
  }
  if (dropped_forbidden > 0) {
    spdlog::debug("{}: dropped {} candidates with forbidden substrings", target->ToString(), dropped_forbidden);
  }
  if (records.size() < want) throw GenerationDegraded(std::move(records), want);
  return records;
}

std::vector<DatasetRecord> TemplateGenerate(const GenerationRule& rule, const TemplateGrammar& grammar,
                                            std::uint64_t seed, std::size_t n) {
  std::vector<DatasetRecord> out;
  for (auto& q : grammar.Generate(rule.target, n, seed)) {
    if (!ContainsForbidden(q, rule.forbidden_substrings).empty()) continue;
    DatasetRecord r;
    r.query = std::move(q);
    r.label = rule.target;
    r.source = RecordSource::kTemplate;
    r.batch_id = "template-" + std::to_string(seed);
    out.push_back(std::move(r));
  }
  return out;
}

Dataset AssembleDataset(const std::vector<std::vector<DatasetRecord>>& batches, const Registry& registry) {
  Dataset d;
  d.registry_version = registry.version();
  d.created_at = FormatTimestamp(SystemClock().Now());
  std::unordered_set<std::string> seen;
  std::size_t index = 0;
  for (const auto& batch : batches) {
    for (const auto& r : batch) {
      const std::string where = "record " + std::to_string(index++) + " (\"" + r.query + "\")";
      if (r.registry_version && *r.registry_version != registry.version()) {
        throw Error(ErrorCode::kAssembly, where + " was labeled against registry version " +
                                              std::to_string(*r.registry_version) + ", expected " +
                                              std::to_string(registry.version()));
      }
      auto label = ValidateLabel(r.label, registry);
      if (!label) {
        throw Error(ErrorCode::kAssembly, where + " has label " + r.label.ToString() + " not in registry version " +
                                              std::to_string(registry.version()));
      }
      if (!seen.insert(DedupKey(r.query)).second) continue;
      DatasetRecord copy = r;
      copy.label = *label;
      copy.registry_version.reset();
      d.records.push_back(std::move(copy));
    }
  }
  return d;
}

Dataset RunPlan(const std::vector<GenerationRule>& plan, GenerationBackend& backend, const Registry& registry,
                const PlanOptions& options) {
  std::vector<std::vector<DatasetRecord>> batches;
  std::unordered_set<std::string> seen;
  for (const auto& rule : plan) {
    int remaining = rule.samples_requested;
    int seq = 0;
    while (remaining > 0) {
      const int size = std::min(remaining, options.batch_size);
      const std::string batch_id = backend.id() + "-" + rule.target.ToString() + "-" + std::to_string(++seq);
      std::vector<DatasetRecord> batch;
      try {
        batch = GenerateBatch(rule, backend, registry, size, batch_id, &seen);
      } catch (const GenerationDegraded& e) {
        if (!options.allow_partial || !e.usable()) throw;
        spdlog::warn("{}: keeping partial batch {} ({} of {})", rule.target.ToString(), batch_id, e.partial().size(),
                     e.requested());
        batch = e.partial();
      }
      for (const auto& r : batch) seen.insert(DedupKey(r.query));
      remaining -= size;
      batches.push_back(std::move(batch));
    }
  }
  return AssembleDataset(batches, registry);
}

std::optional<double> ReviewStats::acceptance_rate() const {
  const std::size_t decided = accepted + rejected;
  if (decided == 0) return std::nullopt;
  return static_cast<double>(accepted) / static_cast<double>(decided);
}

json ReviewStats::ToJson() const {
  const auto rate = acceptance_rate();
  return {{"accepted", accepted}, {"rejected", rejected}, {"acceptance_rate", rate ? json(*rate) : json(nullptr)}};
}

ReviewStats ReviewSession(Dataset& dataset, const std::vector<ReviewDecision>& decisions) {
  std::vector<bool> decided(dataset.records.size(), false);
  for (const auto& d : decisions) {
    if (d.index >= dataset.records.size()) {
      throw Error(ErrorCode::kInvalidArgument, "decision index " + std::to_string(d.index) + " is out of range");
    }
    if (decided[d.index]) {
      throw Error(ErrorCode::kDuplicateDecision, "record " + std::to_string(d.index) + " was decided twice");
    }
    decided[d.index] = true;
  }
  ReviewStats stats;
  for (const auto& d : decisions) {
    auto& r = dataset.records[d.index];
    if (d.accept) {
      r.review = ReviewState::kAccepted;
      r.rejection_reason.reset();
      ++stats.accepted;
    } else {
      r.review = ReviewState::kRejected;
      r.rejection_reason = d.reason.empty() ? std::nullopt : std::optional<std::string>(d.reason);
      ++stats.rejected;
    }
  }
  return stats;
}

ReviewStats ReviewTotals(const Dataset& dataset) {
  ReviewStats stats;
  for (const auto& r : dataset.records) {
    if (r.review == ReviewState::kAccepted) ++stats.accepted;
    if (r.review == ReviewState::kRejected) ++stats.rejected;
  }
  return stats;
}

std::filesystem::path ReviewJournal::PathFor(const std::filesystem::path& dataset_path) {
  return dataset_path.string() + ".review.jsonl";
}

ReviewJournal::ReviewJournal(std::filesystem::path path) : path_(std::move(path)) {}

std::size_t ReviewJournal::Replay(Dataset& dataset) const {
  std::ifstream in(path_);
  if (!in) return 0;
  std::size_t applied = 0;
  std::string line;
  while (std::getline(in, line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;  // torn final line after a crash
    const auto index = j.value("index", std::size_t{0});
    if (index >= dataset.records.size() || dataset.records[index].query != j.value("query", std::string())) {
      spdlog::warn("review journal entry for record {} no longer matches the dataset; skipped", index);
      continue;
    }
    auto& r = dataset.records[index];
    if (j.value("decision", std::string()) == "accept") {
      r.review = ReviewState::kAccepted;
      r.rejection_reason.reset();
    } else {
      r.review = ReviewState::kRejected;
      const std::string reason = j.value("reason", std::string());
      r.rejection_reason = reason.empty() ? std::nullopt : std::optional<std::string>(reason);
    }
    ++applied;
  }
  return applied;
}

void ReviewJournal::Append(const ReviewDecision& decision, const DatasetRecord& record) {
  if (!out_.is_open()) {
    out_.open(path_, std::ios::app);
    if (!out_) throw Error(ErrorCode::kIo, "cannot open review journal " + path_.string());
  }
  json j = {{"index", decision.index}, {"query", record.query}, {"decision", decision.accept ? "accept" : "reject"}};
  if (!decision.reason.empty()) j["reason"] = decision.reason;
  out_ << j.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(ErrorCode::kIo, "write failed for review journal " + path_.string());
}

void ReviewJournal::Remove() {
  if (out_.is_open()) out_.close();
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

ReviewCursor::ReviewCursor(std::filesystem::path dataset_path, const Registry& registry)
    : path_(std::move(dataset_path)),
      dataset_(ReadDataset(path_, registry)),
      journal_(ReviewJournal::PathFor(path_)),
      decided_(dataset_.records.size(), false) {
  resumed_ = journal_.Replay(dataset_);
  if (resumed_ > 0) spdlog::info("resumed {} decisions from {}", resumed_, journal_.path().string());
}

std::optional<std::size_t> ReviewCursor::NextUnreviewed() const {
  for (std::size_t i = 0; i < dataset_.records.size(); ++i) {
    if (dataset_.records[i].review == ReviewState::kUnreviewed && !decided_[i]) return i;
  }
  return std::nullopt;
}

void ReviewCursor::Decide(const ReviewDecision& decision) {
  if (decision.index >= dataset_.records.size()) {
    throw Error(ErrorCode::kInvalidArgument, "decision index " + std::to_string(decision.index) + " is out of range");
  }
  if (decided_[decision.index]) {
    throw Error(ErrorCode::kDuplicateDecision, "record " + std::to_string(decision.index) + " was already decided");
  }
  journal_.Append(decision, dataset_.records[decision.index]);
  ReviewSession(dataset_, {decision});
  decided_[decision.index] = true;
  if (decision.accept) {
    ++session_.accepted;
  } else {
    ++session_.rejected;
  }
}

void ReviewCursor::Save() {
  WriteDataset(path_, dataset_);
  journal_.Remove();
}

json DatasetStatsJson(const Dataset& dataset, const Registry& registry) {
  json modules = json::object();
  for (const auto& [m, n] : dataset.Counts(registry)) modules[m] = n;
  json labels = json::object();
  for (const auto& [l, n] : dataset.LabelCounts()) labels[l] = n;
  std::map<std::string, std::size_t> review;
  for (const auto& r : dataset.records) ++review[std::string(ToString(r.review))];
  json review_json = {{"unreviewed", review["unreviewed"]}, {"accepted", review["accepted"]},
                      {"rejected", review["rejected"]}};
  const auto totals = ReviewTotals(dataset);
  const auto rate = totals.acceptance_rate();
  return {{"total", dataset.records.size()},
          {"registry_version", dataset.registry_version},
          {"modules", modules},
          {"labels", labels},
          {"review", review_json},
          {"acceptance_rate", rate ? json(*rate) : json(nullptr)}};
}

}  // namespace nlapi
