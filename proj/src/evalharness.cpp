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
#include "evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <thread>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "error.hpp"

namespace nlapi {

using nlohmann::json;

const char* const kAggregationFootnote =
    "Overall (micro) weights every query equally; Overall (macro) is the unweighted mean of the per-module "
    "columns. FLC micro pools all module-correct queries; FLC macro averages the per-module function accuracies. "
    "Published comparison tables do not always state which aggregation they use, so both are shown.";

namespace {

json LabelJson(const Label& l) { return json::array({l.module, l.function}); }

Label LabelFrom(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kMalformedDocument, "label must be [module, function]");
  return {j[0].get<std::string>(), j[1].get<std::string>()};
}

json OptJson(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> OptFrom(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::optional<double> Ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> Mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

bool Selected(const DatasetRecord& r, RecordFilter filter) {
  switch (filter) {
    case RecordFilter::kAccepted: return r.review == ReviewState::kAccepted;
    case RecordFilter::kNotRejected: return r.review != ReviewState::kRejected;
    case RecordFilter::kAll: return true;
  }
  return false;
}

PredictionRecord Predict(const DatasetRecord& r, Classifier& classifier, const std::string& backend_id,
                         const Registry& registry) {
  PredictionRecord p;
  p.query = r.query;
  p.true_label = r.label;
  p.backend_id = backend_id;
  p.registry_version = registry.version();
  const auto start = std::chrono::steady_clock::now();
  try {
    ClassificationResult c = classifier.Classify(r.query, registry);
    p.pred_label = c.label;
    p.params = c.params;
    for (const auto& d : c.diagnostics) {
      if (d == "backend_unparseable") p.error_flag = d;
    }
  } catch (const std::exception& e) {
    p.pred_label = InvalidLabel();
    p.error_flag = std::string("backend_error: ") + e.what();
  }
  p.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return p;
}

}  // namespace

json PredictionRecord::ToJson() const {
  json j = {{"query", query},           {"true_label", LabelJson(true_label)}, {"pred_label", LabelJson(pred_label)},
            {"backend_id", backend_id}, {"latency_ms", latency_ms}};
  if (!params.empty()) j["params"] = params;
  if (error_flag) j["error_flag"] = *error_flag;
  if (registry_version) j["registry_version"] = *registry_version;
  return j;
}

PredictionRecord PredictionRecord::FromJson(const json& j) {
  try {
    PredictionRecord p;
    p.query = j.at("query").get<std::string>();
    p.true_label = LabelFrom(j.at("true_label"));
    p.pred_label = LabelFrom(j.at("pred_label"));
    p.backend_id = j.value("backend_id", std::string());
    p.latency_ms = j.value("latency_ms", 0.0);
    if (j.contains("params")) p.params = j.at("params").get<ParamMap>();
    if (j.contains("error_flag") && !j.at("error_flag").is_null()) p.error_flag = j.at("error_flag").get<std::string>();
    if (j.contains("registry_version")) p.registry_version = j.at("registry_version").get<std::int64_t>();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("bad prediction record: ") + e.what());
  }
}

std::vector<PredictionRecord> ReadPredictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open predictions " + path.string());
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      if (in.peek() == std::char_traits<char>::eof()) {
        spdlog::warn("{}: ignoring torn final line {}", path.string(), line_no);
        break;
      }
      throw Error(ErrorCode::kMalformedDocument, path.string() + ":" + std::to_string(line_no) + " is not JSON");
    }
    out.push_back(PredictionRecord::FromJson(j));
  }
  return out;
}

void WritePredictions(const std::filesystem::path& path, const std::vector<PredictionRecord>& preds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& p : preds) out << p.ToJson().dump() << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<PredictionRecord> RunPredictions(const Dataset& dataset, Classifier& classifier,
                                             const std::string& backend_id, const Registry& registry,
                                             const std::filesystem::path& out, const RunOptions& options) {
  std::vector<const DatasetRecord*> selected;
  for (const auto& r : dataset.records) {
    if (Selected(r, options.filter)) selected.push_back(&r);
  }
  if (selected.empty()) throw Error(ErrorCode::kInvalidArgument, "no dataset records selected for prediction");

  std::unordered_map<std::string, PredictionRecord> done;
  bool needs_newline = false;
  if (std::filesystem::exists(out)) {
    for (auto& p : ReadPredictions(out)) {
      std::string key = DedupKey(p.query);
      done.emplace(std::move(key), std::move(p));
    }
    // A torn final line is cut off before appending; a complete one without
    // its newline gets one.
    std::ifstream probe(out, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(probe)), std::istreambuf_iterator<char>());
    probe.close();
    if (!text.empty() && text.back() != '\n') {
      const std::size_t cut = text.rfind('\n');
      const std::size_t keep = cut == std::string::npos ? 0 : cut + 1;
      if (json::accept(text.substr(keep))) {
        needs_newline = true;
      } else {
        std::filesystem::resize_file(out, keep);
      }
    }
    if (!done.empty()) spdlog::info("resuming: {} predictions already in {}", done.size(), out.string());
  }

  std::vector<const DatasetRecord*> todo;
  for (const auto* r : selected) {
    if (!done.count(DedupKey(r->query))) todo.push_back(r);
  }
  if (options.max_new > 0 && todo.size() > options.max_new) todo.resize(options.max_new);

  std::ofstream file(out, std::ios::app);
  if (!file) throw Error(ErrorCode::kIo, "cannot append to " + out.string());
  if (needs_newline) file << '\n';

  const std::size_t workers = static_cast<std::size_t>(std::max(1, options.workers));
  const std::size_t window = workers * 16;
  for (std::size_t begin = 0; begin < todo.size(); begin += window) {
    const std::size_t end = std::min(todo.size(), begin + window);
    std::vector<PredictionRecord> results(end - begin);
    std::atomic<std::size_t> next{begin};
    auto work = [&] {
      for (std::size_t i = next.fetch_add(1); i < end; i = next.fetch_add(1)) {
        results[i - begin] = Predict(*todo[i], classifier, backend_id, registry);
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < std::min(workers, end - begin); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& p : results) {
      file << p.ToJson().dump() << '\n';
      done.emplace(DedupKey(p.query), std::move(p));
    }
    file.flush();
    if (!file) throw Error(ErrorCode::kIo, "write failed for " + out.string());
  }

  std::vector<PredictionRecord> ordered;
  ordered.reserve(selected.size());
  for (const auto* r : selected) {
    auto it = done.find(DedupKey(r->query));
    if (it != done.end()) ordered.push_back(it->second);
  }
  return ordered;
}

std::optional<double> MlcAcc(const std::vector<PredictionRecord>& preds, const std::optional<std::string>& module_filter) {
  std::size_t n = 0;
  std::size_t correct = 0;
  for (const auto& p : preds) {
    if (module_filter && p.true_label.module != *module_filter) continue;
    ++n;
    if (p.pred_label.module == p.true_label.module) ++correct;
  }
  return Ratio(correct, n);
}

std::optional<double> FlcAcc(const std::vector<PredictionRecord>& preds, const std::optional<std::string>& module_filter) {
  std::size_t module_correct = 0;
  std::size_t both = 0;
  for (const auto& p : preds) {
    if (module_filter && p.true_label.module != *module_filter) continue;
    if (p.pred_label.module != p.true_label.module) continue;
    ++module_correct;
    if (p.pred_label.function == p.true_label.function) ++both;
  }
  return Ratio(both, module_correct);
}

json EvalReport::ToJson() const {
  json modules_json = json::object();
  for (const auto& name : module_order) {
    const ModuleScore& s = modules.at(name);
    modules_json[name] = {{"n", s.n},
                          {"module_correct", s.module_correct},
                          {"both_correct", s.both_correct},
                          {"mlc_acc", OptJson(s.mlc)},
                          {"flc_acc", OptJson(s.flc)}};
  }
  return {{"backend_id", backend_id},
          {"registry_version", registry_version},
          {"module_order", module_order},
          {"modules", modules_json},
          {"overall_mlc_micro", OptJson(mlc_micro)},
          {"overall_mlc_macro", OptJson(mlc_macro)},
          {"flc_acc", OptJson(flc_micro)},
          {"flc_acc_macro", OptJson(flc_macro)},
          {"n_queries", n_queries},
          {"n_module_correct", n_module_correct},
          {"n_both_correct", n_both_correct},
          {"n_errors", n_errors},
          {"mean_latency_ms", mean_latency_ms}};
}

EvalReport EvalReport::FromJson(const json& j) {
  try {
    EvalReport r;
    r.backend_id = j.at("backend_id").get<std::string>();
    r.registry_version = j.value("registry_version", std::int64_t{0});
    r.module_order = j.at("module_order").get<std::vector<std::string>>();
    for (const auto& name : r.module_order) {
      const json& m = j.at("modules").at(name);
      ModuleScore s;
      s.n = m.at("n").get<std::size_t>();
      s.module_correct = m.at("module_correct").get<std::size_t>();
      s.both_correct = m.at("both_correct").get<std::size_t>();
      s.mlc = OptFrom(m, "mlc_acc");
      s.flc = OptFrom(m, "flc_acc");
      r.modules.emplace(name, s);
    }
    r.mlc_micro = OptFrom(j, "overall_mlc_micro");
    r.mlc_macro = OptFrom(j, "overall_mlc_macro");
    r.flc_micro = OptFrom(j, "flc_acc");
    r.flc_macro = OptFrom(j, "flc_acc_macro");
    r.n_queries = j.at("n_queries").get<std::size_t>();
    r.n_module_correct = j.at("n_module_correct").get<std::size_t>();
    r.n_both_correct = j.at("n_both_correct").get<std::size_t>();
    r.n_errors = j.value("n_errors", std::size_t{0});
    r.mean_latency_ms = j.value("mean_latency_ms", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("bad report: ") + e.what());
  }
}

EvalReport BuildReport(const std::string& backend_id, const std::vector<PredictionRecord>& preds,
                       const Registry& registry) {
  EvalReport r;
  r.backend_id = backend_id;
  r.registry_version = registry.version();
  for (const auto& m : registry.modules()) {
    r.module_order.push_back(m.name);
    r.modules[m.name];
  }
  double latency_sum = 0.0;
  for (const auto& p : preds) {
    auto it = r.modules.find(p.true_label.module);
    if (it == r.modules.end()) {
      throw Error(ErrorCode::kInvalidArgument, "true label " + p.true_label.ToString() + " is not in the registry");
    }
    ModuleScore& s = it->second;
    ++s.n;
    ++r.n_queries;
    if (p.pred_label.module == p.true_label.module) {
      ++s.module_correct;
      ++r.n_module_correct;
      if (p.pred_label.function == p.true_label.function) {
        ++s.both_correct;
        ++r.n_both_correct;
      }
    }
    if (p.error_flag) ++r.n_errors;
    latency_sum += p.latency_ms;
  }
  std::vector<double> mlc_values;
  std::vector<double> flc_values;
  for (auto& [name, s] : r.modules) {
    s.mlc = Ratio(s.module_correct, s.n);
    s.flc = Ratio(s.both_correct, s.module_correct);
  }
  for (const auto& name : r.module_order) {
    const ModuleScore& s = r.modules.at(name);
    if (s.mlc) mlc_values.push_back(*s.mlc);
    if (s.flc) flc_values.push_back(*s.flc);
  }
  r.mlc_micro = Ratio(r.n_module_correct, r.n_queries);
  r.mlc_macro = Mean(mlc_values);
  r.flc_micro = Ratio(r.n_both_correct, r.n_module_correct);
  r.flc_macro = Mean(flc_values);
  r.mean_latency_ms = r.n_queries ? latency_sum / static_cast<double>(r.n_queries) : 0.0;
  return r;
}

std::string RenderTable(const std::vector<EvalReport>& reports) {
  if (reports.empty()) return "(no reports)\n";
  const auto& modules = reports.front().module_order;
  std::vector<std::string> header = {"Backend"};
  for (const auto& m : modules) header.push_back(m);
  for (const char* h : {"Overall (micro)", "Overall (macro)", "FLC-Acc Avg (micro)", "FLC-Acc Avg (macro)"}) {
    header.push_back(h);
  }
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", *v);
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.backend_id};
    for (const auto& m : modules) {
      auto it = r.modules.find(m);
      row.push_back(it == r.modules.end() ? "n/a" : cell(it->second.mlc));
    }
    row.push_back(cell(r.mlc_micro));
    row.push_back(cell(r.mlc_macro));
    row.push_back(cell(r.flc_micro));
    row.push_back(cell(r.flc_macro));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  auto emit = [&](const std::vector<std::string>& row) {
    out += "|";
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += " " + row[c] + std::string(width[c] - row[c].size(), ' ') + " |";
    }
    out += "\n";
  };
  emit(header);
  out += "|";
  for (std::size_t c = 0; c < header.size(); ++c) out += std::string(width[c] + 2, '-') + "|";
  out += "\n";
  for (const auto& row : rows) emit(row);
  out += "\nNote: ";
  out += kAggregationFootnote;
  out += "\n";
  return out;
}

ReportSet BuildReportSet(const std::vector<EvalReport>& reports) {
  ReportSet set;
  set.reports = reports;
  set.table = RenderTable(reports);
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(r.ToJson());
  set.json = {{"reports", arr}, {"footnote", kAggregationFootnote}};
  return set;
}

ReportSet BuildReportSet(const std::vector<std::filesystem::path>& prediction_files, const Registry& registry) {
  if (prediction_files.empty()) throw Error(ErrorCode::kInvalidArgument, "no prediction files given");
  std::vector<EvalReport> reports;
  std::optional<std::int64_t> version;
  std::string version_source;
  for (const auto& path : prediction_files) {
    const auto preds = ReadPredictions(path);
    std::string backend_id;
    for (const auto& p : preds) {
      if (backend_id.empty()) backend_id = p.backend_id;
      if (p.registry_version) {
        if (version && *version != *p.registry_version) {
          throw Error(ErrorCode::kInvalidArgument, "mixed registry versions: " + version_source + " uses " +
                                                       std::to_string(*version) + ", " + path.string() + " uses " +
                                                       std::to_string(*p.registry_version));
        }
        if (!version) {
          version = p.registry_version;
          version_source = path.string();
        }
      }
    }
    if (backend_id.empty()) backend_id = path.stem().string();
    reports.push_back(BuildReport(backend_id, preds, registry));
    if (version) reports.back().registry_version = *version;
  }
  return BuildReportSet(reports);
}

std::string SelectBest(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no reports to select from");
  auto key = [](const std::optional<double>& v) { return v ? *v : -1.0; };
  const EvalReport* best = &reports.front();
  for (const auto& r : reports) {
    const double a = key(r.mlc_micro), b = key(best->mlc_micro);
    if (a != b) {
      if (a > b) best = &r;
      continue;
    }
    const double fa = key(r.flc_micro), fb = key(best->flc_micro);
    if (fa != fb) {
      if (fa > fb) best = &r;
      continue;
    }
    if (r.mean_latency_ms < best->mean_latency_ms) best = &r;
  }
  return best->backend_id;
}

json PoolConfigFragment(const std::string& backend_id, const std::vector<BackendSpec>& known_specs) {
  json spec = {{"id", backend_id}};
  for (const auto& s : known_specs) {
    if (s.id == backend_id) spec = s.ToJson();
  }
  if (spec.size() == 1 && backend_id == "mock") spec["kind"] = "mock_rules";
  return {{"pool", {{"policy", "round_robin"}, {"backends", json::array({spec})}}}};
}

}  // namespace nlapi
