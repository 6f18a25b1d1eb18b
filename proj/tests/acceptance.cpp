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
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any check fails.
#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cache.hpp"
#include "clock.hpp"
#include "datagen.hpp"
#include "evalharness.hpp"
#include "execute.hpp"
#include "gateway.hpp"
#include "http_server.hpp"
#include "mock_rules.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"
#include "support/test_util.hpp"
#include "weather.hpp"

namespace nlapi {
namespace {

using nlohmann::json;
using Clk = std::chrono::steady_clock;

// Collects failures for one check.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string Summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    if (failed_ > failures_.size()) s += "; +" + std::to_string(failed_ - failures_.size()) + " more";
    return s;
  }
  std::string note;

 private:
  std::vector<std::string> failures_;
  std::size_t failed_ = 0;
};

double Seconds(Clk::time_point start) { return std::chrono::duration<double>(Clk::now() - start).count(); }

std::string Opt(const std::optional<double>& v) {
  if (!v) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

std::map<std::string, int> ReferenceTotals() {
  std::map<std::string, int> totals;
  for (const auto& [m, n] : testing::ReferenceCounts()) totals[m] = static_cast<int>(n);
  return totals;
}

// ---------------------------------------------------------------------------

void MetricOracle(Check& c) {
  const Registry registry = Registry::Default();
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<std::size_t> size(1, 2000);
  const auto start = Clk::now();
  std::size_t records = 0;
  for (int set = 0; set < 1000; ++set) {
    auto [preds, rows] = testing::RandomPredictions(rng, size(rng), registry);
    records += preds.size();
    const auto mlc = MlcAcc(preds), flc = FlcAcc(preds);
    c.Expect(mlc == oracle::ModuleAccuracy(rows), "mlc mismatch in set " + std::to_string(set));
    c.Expect(flc == oracle::FunctionAccuracy(rows), "flc mismatch in set " + std::to_string(set));
    // Joint accuracy identity on integer counts.
    std::size_t module_hits = 0, both = 0;
    for (const auto& r : rows) {
      module_hits += r.true_module == r.pred_module;
      both += r.true_module == r.pred_module && r.true_function == r.pred_function;
    }
    if (flc && mlc) {
      c.Expect(std::abs(*flc * *mlc - static_cast<double>(both) / static_cast<double>(rows.size())) < 1e-12,
               "joint identity in set " + std::to_string(set));
    }
    if (set % 100 == 0) {
      std::shuffle(preds.begin(), preds.end(), rng);
      c.Expect(MlcAcc(preds) == mlc && FlcAcc(preds) == flc, "permutation changed a metric");
    }
  }
  const double secs = Seconds(start);
  c.Expect(secs < 10.0, "took " + std::to_string(secs) + " s");
  c.note = "1000 sets, " + std::to_string(records) + " records, " + std::to_string(secs).substr(0, 5) + " s";
}

void FlcNull(Check& c) {
  const Registry registry = Registry::Default();
  std::vector<Label> labels;
  for (const auto& m : registry.modules()) {
    for (const auto& f : m.functions) labels.push_back({m.name, f.name});
  }
  std::mt19937_64 rng(7);
  std::size_t sets = 0;
  for (std::size_t n = 0; n <= 20; ++n) {
    // Variants: rotate to another module, always the reserved label, same
    // function name under another module, and a random wrong module.
    for (int variant = 0; variant < 4; ++variant) {
      std::vector<PredictionRecord> preds;
      for (std::size_t i = 0; i < n; ++i) {
        PredictionRecord p;
        p.query = std::to_string(i);
        p.true_label = labels[(i * 7 + variant) % labels.size()];
        switch (variant) {
          case 0: p.pred_label = labels[(i * 7 + variant + 13) % labels.size()]; break;
          case 1: p.pred_label = InvalidLabel(); break;
          case 2: p.pred_label = {"x" + p.true_label.module, p.true_label.function}; break;
          default: p.pred_label = labels[rng() % labels.size()]; break;
        }
        if (p.pred_label.module == p.true_label.module) {
          p.pred_label.module = p.true_label.module == "calculator" ? "notes" : "calculator";
        }
        preds.push_back(std::move(p));
      }
      ++sets;
      const auto flc = FlcAcc(preds);
      c.Expect(!flc, "flc not null for n=" + std::to_string(n));
      const auto mlc = MlcAcc(preds);
      c.Expect(n == 0 ? !mlc : (mlc && *mlc == 0.0), "mlc wrong for n=" + std::to_string(n));
      for (const auto& m : registry.modules()) c.Expect(!FlcAcc(preds, m.name), "module flc not null");
      try {
        const EvalReport r = BuildReport("adv", preds, registry);
        c.Expect(!r.flc_micro && !r.flc_macro, "report flc not null");
        c.Expect(r.ToJson().at("flc_acc").is_null(), "json flc not null");
        c.Expect(RenderTable({r}).find("n/a") != std::string::npos, "table lacks n/a");
      } catch (const std::exception& e) {
        c.Expect(false, std::string("report threw: ") + e.what());
      }
    }
  }
  c.note = std::to_string(sets) + " adversarial sets, N in [0, 20]";
}

std::vector<std::string> Cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  std::getline(ss, cell, '|');
  while (std::getline(ss, cell, '|')) {
    const auto b = cell.find_first_not_of(' '), e = cell.find_last_not_of(' ');
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

void ReferenceReport(Check& c) {
  const Registry registry = Registry::Default();
  testing::TempDir dir;
  const std::vector<double> top = {0.996, 0.995, 0.985, 0.990, 0.990, 0.985, 1.000};
  const std::vector<double> low = {0.868, 0.775, 0.740, 0.715, 0.690, 0.725, 0.800};
  WritePredictions(dir / "gpt-4.jsonl", testing::BuildPredictions("gpt-4", testing::Row(top), registry));
  WritePredictions(dir / "llama3-8b.jsonl", testing::BuildPredictions("llama3-8b", testing::Row(low), registry));
  const ReportSet set = BuildReportSet({dir / "gpt-4.jsonl", dir / "llama3-8b.jsonl"}, registry);

  // Per-module cells are reproduced exactly.
  const auto counts = testing::ReferenceCounts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    c.Expect(set.reports[0].modules.at(counts[i].first).mlc == top[i], "top row cell " + counts[i].first);
    c.Expect(set.reports[1].modules.at(counts[i].first).mlc == low[i], "low row cell " + counts[i].first);
  }

  std::istringstream lines(set.table);
  std::string line;
  std::vector<std::string> header;
  std::map<std::string, std::vector<std::string>> rows;
  while (std::getline(lines, line)) {
    if (line.rfind("| Backend", 0) == 0) header = Cells(line);
    if (line.rfind("| gpt-4", 0) == 0) rows["gpt-4"] = Cells(line);
    if (line.rfind("| llama3-8b", 0) == 0) rows["llama3-8b"] = Cells(line);
  }
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  const std::size_t micro = col("Overall (micro)"), macro = col("Overall (macro)");
  c.Expect(micro < header.size() && macro < header.size(), "table lacks overall columns");
  c.Expect(rows.size() == 2, "table lacks backend rows");
  if (!c.ok()) return;
  const std::string top_macro = rows["gpt-4"].at(macro), low_micro = rows["llama3-8b"].at(micro);
  c.Expect(std::abs(std::stod(top_macro) - 0.992) <= 0.0005, "macro cell " + top_macro);
  c.Expect(std::abs(std::stod(low_micro) - 0.758) <= 0.0005, "micro cell " + low_micro);
  c.Expect(std::abs(*set.reports[0].mlc_macro - 0.992) <= 0.0005, "macro value");
  c.Expect(std::abs(*set.reports[1].mlc_micro - 0.758) <= 0.0005, "micro value");
  c.Expect(set.table.find(kAggregationFootnote) != std::string::npos, "footnote missing");
  c.Expect(SelectBest(set.reports) == "gpt-4", "selection");
  c.note = "macro " + top_macro + ", micro " + low_micro + ", footnote present";
}

void OfflineLoop(Check& c) {
  const auto start = Clk::now();
  const Registry registry = Registry::Default();
  testing::TempDir dir;
  TemplateGenerationBackend backend(42);
  Dataset dataset = RunPlan(AllocatePlan(registry, ReferenceTotals()), backend, registry);
  for (auto& r : dataset.records) r.review = ReviewState::kAccepted;
  WriteDataset(dir / "dataset.json", dataset);
  const Dataset loaded = ReadDataset(dir / "dataset.json", registry);
  c.Expect(loaded.records.size() == 1300, "dataset has " + std::to_string(loaded.records.size()) + " records");

  MockClassifier mock(MockRuleset::Default());
  const auto preds = RunPredictions(loaded, mock, "mock", registry, dir / "mock.jsonl");
  const EvalReport report = BuildReport("mock", ReadPredictions(dir / "mock.jsonl"), registry);
  c.Expect(report.n_queries == 1300, "report covers " + std::to_string(report.n_queries));
  c.Expect(report.mlc_micro == 1.0, "mlc " + Opt(report.mlc_micro));
  c.Expect(report.flc_micro == 1.0, "flc " + Opt(report.flc_micro));
  c.Expect(RenderTable({report}).find("0.9") == std::string::npos, "table shows a non-perfect cell");
  const double secs = Seconds(start);
  c.Expect(secs < 60.0, "took " + std::to_string(secs) + " s");
  c.note = "1300 records, mlc " + Opt(report.mlc_micro) + ", flc " + Opt(report.flc_micro) + ", " +
           std::to_string(secs).substr(0, 5) + " s";
}

// Always answers with the same handful of queries.
class RepetitiveBackend final : public GenerationBackend {
 public:
  std::string id() const override { return "repetitive"; }
  RecordSource source() const override { return RecordSource::kLlm; }
  std::vector<std::string> Generate(const GenerationRule&, std::size_t count, const Registry&) override {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back("add " + std::to_string(i % 3) + " and 1");
    return out;
  }
};

void DatasetMechanics(Check& c) {
  const Registry registry = Registry::Default();
  const auto plan = AllocatePlan(registry, ReferenceTotals());
  TemplateGenerationBackend backend(42);
  std::vector<std::vector<DatasetRecord>> batches;
  std::size_t batch_no = 0;
  for (const auto& rule : plan) {
    for (int done = 0; done < rule.samples_requested;) {
      const int size = std::min(rule.samples_requested - done, kDefaultBatchSize);
      try {
        auto batch = GenerateBatch(rule, backend, registry, size, "b" + std::to_string(batch_no++));
        std::set<std::string> keys;
        for (const auto& r : batch) keys.insert(DedupKey(r.query));
        c.Expect(batch.size() == static_cast<std::size_t>(size) && keys.size() == batch.size(),
                 "batch for " + rule.target.ToString() + " not exact");
        batches.push_back(std::move(batch));
      } catch (const GenerationDegraded& e) {
        c.Expect(e.partial().size() < static_cast<std::size_t>(size), "degraded batch was full");
        batches.push_back(e.partial());
      }
      done += size;
    }
  }
  // A backend that cannot fill the batch must raise degraded, never return short.
  bool degraded = false;
  try {
    GenerateBatch(plan.front(), *std::make_unique<RepetitiveBackend>(), registry, 10);
  } catch (const GenerationDegraded& e) {
    degraded = e.partial().size() == 3 && e.requested() == 10;
  }
  c.Expect(degraded, "short batch did not raise degraded");

  try {
    const Dataset dataset = AssembleDataset(batches, registry);
    ValidateDataset(dataset, registry);
    const auto counts = dataset.Counts(registry);
    for (const auto& [module, n] : testing::ReferenceCounts()) {
      c.Expect(counts.at(module) == n, module + " has " + std::to_string(counts.at(module)));
    }
    c.Expect(dataset.records.size() == 1300, "total " + std::to_string(dataset.records.size()));
    c.note = std::to_string(batches.size()) + " batches, " + std::to_string(dataset.records.size()) +
             " records, counts 250/200x5/50";
  } catch (const std::exception& e) {
    c.Expect(false, std::string("assembly failed: ") + e.what());
  }
}

std::string RandomText(std::mt19937_64& rng) {
  static const std::vector<std::string> words = {
      "add",   "weather", "note",  "email", "delete", "in",    "and",   "the",  "3",     "-7.5", "1e308",
      "meeting", "#4",    "\"",    "\\",    "{",      "}",     "today", "0",    "remind", "café", "東京",
      "😀",    "send",    "draft", "7",     "event",  "to",    "2024-02-30", "25:99", "log", "of", "factorial"};
  std::string s;
  const std::size_t n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + words[rng() % words.size()];
  return s;
}

std::string RandomBytes(std::mt19937_64& rng, std::size_t n) {
  std::string s(n, '\0');
  for (auto& ch : s) ch = static_cast<char>(rng() % 256);
  return s;
}

void GatewayFuzz(Check& c) {
  const Registry registry = Registry::Default();
  auto gateway = std::shared_ptr<Gateway>(Gateway::FromConfig(GatewayConfig::FromJson(json::object())));
  HttpServer server(gateway);
  const int port = server.Bind("127.0.0.1", 0);
  server.Start();
  httplib::Client client("127.0.0.1", port);
  client.set_keep_alive(true);
  client.set_tcp_nodelay(true);
  client.set_read_timeout(10, 0);

  const TemplateGrammar& grammar = TemplateGrammar::Default();
  std::vector<std::string> templated;
  for (const auto& m : registry.modules()) {
    for (const auto& f : m.functions) {
      for (auto& q : grammar.Generate({m.name, f.name}, 40, 99)) templated.push_back(std::move(q));
    }
  }

  std::mt19937_64 rng(4242);
  std::map<int, int> statuses;
  int no_response = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string body;
    switch (i % 10) {
      case 0: case 1: case 2:
        body = json{{"text", templated[rng() % templated.size()]}, {"session_id", "fuzz"}}.dump();
        break;
      case 3: case 4: body = json{{"text", RandomText(rng)}, {"session_id", "fuzz"}}.dump(); break;
      case 5: {
        // Mutate a templated query.
        std::string q = templated[rng() % templated.size()];
        for (int k = 0; k < 3 && !q.empty(); ++k) q[rng() % q.size()] = static_cast<char>(32 + rng() % 95);
        body = json{{"text", q}, {"session_id", i % 20 == 5 ? "fuzz" : ""}}.dump();
        break;
      }
      case 6: body = "{\"text\":\"" + RandomBytes(rng, rng() % 40) + "\"}"; break;
      case 7: body = RandomBytes(rng, rng() % 64); break;
      case 8: {
        static const std::vector<std::string> odd = {
            "", "{}", "[]", "null", "{\"text\":null}", "{\"text\":42}", "{\"text\":\"\"}", "{\"text\":\"   \"}",
            "{\"text\":\"add 1 and 2\",\"session_id\":\"bad id!\"}", "{\"text\":[\"add\"]}",
            "{\"text\":\"add 1 and 2\",\"session_id\":7}"};
        body = odd[rng() % odd.size()];
        break;
      }
      default: body = json{{"text", std::string(3990 + rng() % 20, 'a')}, {"session_id", "long"}}.dump(); break;
    }
    auto res = client.Post("/v1/query", body, "application/json");
    if (!res) {
      ++no_response;
      continue;
    }
    ++statuses[res->status];
  }
  c.Expect(no_response == 0, std::to_string(no_response) + " requests got no response");
  c.Expect(statuses.count(500) == 0, "internal errors");
  for (const auto& [status, n] : statuses) {
    c.Expect(status == 200 || status == 400 || status == 413 || status == 422, "unexpected status " + std::to_string(status));
  }

  int invalid = 0;
  for (const auto& q : grammar.Generate({"routes_not_exist", "return_invalid_error"}, 50, 5)) {
    auto res = client.Post("/v1/query", json{{"text", q}, {"session_id", "invalid"}}.dump(), "application/json");
    c.Expect(res && res->status == 200, "invalid route query failed: " + q);
    if (!res || res->status != 200) continue;
    const json j = json::parse(res->body);
    const bool ok = j["label"][0] == "routes_not_exist" && j["result"]["status"] == "invalid_route" &&
                    !j["result"]["message"].get<std::string>().empty() && j["result"]["payload"].is_null();
    c.Expect(ok, "not an invalid_route result: " + q);
    invalid += ok;
  }
  server.Stop();
  std::string dist;
  for (const auto& [status, n] : statuses) dist += (dist.empty() ? "" : ", ") + std::to_string(status) + "x" + std::to_string(n);
  c.note = "10000 queries (" + dist + "), " + std::to_string(invalid) + "/50 invalid_route";
}

struct CountingGateway {
  explicit CountingGateway(std::vector<std::string> ids, std::chrono::seconds ttl = std::chrono::seconds(300)) {
    GatewayDeps deps;
    deps.clock = clock;
    deps.cache = std::make_shared<TtlLruCache>(1000, ttl, clock);
    deps.classifier_factory = [this](const BackendSpec& spec) -> std::shared_ptr<Classifier> {
      auto c = std::make_shared<testing::CountingClassifier>(spec.id);
      counters[spec.id] = c;
      return c;
    };
    std::vector<BackendSpec> specs;
    for (const auto& id : ids) specs.push_back(testing::MockSpec(id));
    gateway = std::make_unique<Gateway>(std::move(deps), specs, PoolPolicy::kRoundRobin);
  }

  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>(
      std::chrono::sys_days{std::chrono::year{2024} / std::chrono::January / 15} + std::chrono::hours(12));
  std::map<std::string, std::shared_ptr<testing::CountingClassifier>> counters;
  std::unique_ptr<Gateway> gateway;
};

void CacheContract(Check& c) {
  CountingGateway g({"mock"}, std::chrono::seconds(60));
  int cached = 0;
  for (int i = 0; i < 50; ++i) cached += g.gateway->HandleQuery({"add 5 and 3", "cache"}).cached;
  c.Expect(g.counters["mock"]->calls() == 1, "invocations within ttl: " + std::to_string(g.counters["mock"]->calls()));
  c.Expect(g.gateway->classifier_invocations() == 1, "gateway counter within ttl");
  c.Expect(cached == 49, "cached responses: " + std::to_string(cached));
  g.clock->Advance(std::chrono::seconds(61));
  const QueryResponse after = g.gateway->HandleQuery({"add 5 and 3", "cache"});
  c.Expect(!after.cached, "response after expiry marked cached");
  c.Expect(g.counters["mock"]->calls() == 2, "invocations after ttl: " + std::to_string(g.counters["mock"]->calls()));
  c.Expect(g.gateway->classifier_invocations() == 2, "gateway counter after ttl");
  c.note = "invocations 1 then 2 (ttl 60 s, manual clock)";
}

void RoundRobin(Check& c) {
  const std::vector<std::string> ids = {"b1", "b2", "b3"};
  {
    CountingGateway g(ids);
    for (int i = 0; i < 300; ++i) g.gateway->HandleQuery({"add " + std::to_string(i) + " and 1", "rr"});
    for (const auto& id : ids) c.Expect(g.counters[id]->calls() == 100, "single-threaded " + id + " served " + std::to_string(g.counters[id]->calls()));
  }
  {
    CountingGateway g(ids);
    std::atomic<int> next{0};
    std::atomic<int> errors{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&] {
        for (int i = next++; i < 300; i = next++) {
          try {
            g.gateway->HandleQuery({"multiply " + std::to_string(i) + " by 2", "rr"});
          } catch (...) {
            ++errors;
          }
        }
      });
    }
    for (auto& t : threads) t.join();
    c.Expect(errors == 0, "errors under concurrency");
    for (const auto& id : ids) c.Expect(g.counters[id]->calls() == 100, "8 threads " + id + " served " + std::to_string(g.counters[id]->calls()));
  }
  c.note = "100/100/100 single-threaded and with 8 threads";
}

// Runs one bound call through the executor.
class Executor {
 public:
  ExecutionResult Run(const std::string& module, const std::string& function, const ParamMap& params = {}) {
    const Label label{module, function};
    auto bound = BindParams(label, *registry_.FindFunction(label), params, clock_);
    if (auto* f = std::get_if<BindingFailure>(&bound)) return ExecutionResult::Fail(f->status, f->message());
    return ExecuteCall(std::get<BoundArgs>(bound), stores, *FixtureWeatherProvider::Default(), clock_);
  }
  EntityStores stores;

 private:
  const Registry registry_ = Registry::Default();
  ManualClock clock_{std::chrono::sys_days{std::chrono::year{2024} / std::chrono::January / 15}};
};

// Drives one store with random operations and compares against a map.
struct StoreModel {
  std::string module;
  std::string create, list, remove, update;
  std::function<ParamMap(int, std::mt19937_64&)> create_params;
  std::function<ParamMap(const std::string&, int, std::mt19937_64&)> update_params;
  std::function<json(const ParamMap&)> apply;  // fields a created or updated record must show
};

void RunStoreModel(Check& c, const StoreModel& m, std::uint64_t seed) {
  Executor ex;
  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, json> model;
  std::uint64_t next = 1;
  for (int i = 0; i < 10000; ++i) {
    const int op = static_cast<int>(rng() % 10);
    const std::uint64_t key = 1 + rng() % (next + 1);
    const std::string id = std::to_string(key);
    if (op < 4) {
      const ParamMap p = m.create_params(i, rng);
      auto r = ex.Run(m.module, m.create, p);
      c.Expect(r.status == ExecStatus::kOk && r.payload->at("id") == std::to_string(next), m.module + " create id");
      model[next++] = m.apply(p);
    } else if (op < 7) {
      const ParamMap p = m.update_params(id, i, rng);
      auto r = ex.Run(m.module, m.update, p);
      auto it = model.find(key);
      c.Expect((r.status == ExecStatus::kOk) == (it != model.end()), m.module + " update " + id + ": " + r.message);
      if (it != model.end()) it->second.update(m.apply(p));
    } else {
      auto r = ex.Run(m.module, m.remove, {{"id", id}});
      c.Expect((r.status == ExecStatus::kOk) == (model.erase(key) > 0), m.module + " delete " + id);
    }
  }
  auto listed = ex.Run(m.module, m.list);
  c.Expect(listed.status == ExecStatus::kOk && listed.payload->size() == model.size(), m.module + " final size");
  if (listed.status != ExecStatus::kOk) return;
  for (const auto& rec : *listed.payload) {
    const std::uint64_t key = std::stoull(rec.at("id").get<std::string>());
    auto it = model.find(key);
    c.Expect(it != model.end(), m.module + " lists unknown id");
    if (it == model.end()) continue;
    for (const auto& [field, value] : it->second.items()) {
      c.Expect(rec.at(field) == value, m.module + " field " + field + " of " + std::to_string(key));
    }
  }
}

void CrudLinearizable(Check& c) {
  auto word = [](std::mt19937_64& rng) { return "w" + std::to_string(rng() % 1000); };
  auto date = [](std::mt19937_64& rng) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "2024-%02d-%02d", static_cast<int>(1 + rng() % 12), static_cast<int>(1 + rng() % 28));
    return std::string(buf);
  };
  auto project = [](std::vector<std::string> fields) {
    return [fields](const ParamMap& p) {
      json j = json::object();
      for (const auto& f : fields) {
        if (p.count(f)) j[f] = p.at(f);
      }
      return j;
    };
  };

  std::vector<StoreModel> models = {
      {"notes", "create", "get_all_notes", "delete_note", "update_note",
       [&](int i, std::mt19937_64& rng) { return ParamMap{{"content", "c" + std::to_string(i)}, {"title", word(rng)}}; },
       [&](const std::string& id, int i, std::mt19937_64& rng) {
         ParamMap p{{"id", id}, {"content", "u" + std::to_string(i)}};
         if (rng() % 2) p["title"] = word(rng);
         return p;
       },
       project({"content", "title"})},
      {"notification", "send_notification", "view_notification", "delete_notification", "mark_as_read",
       [&](int i, std::mt19937_64& rng) { return ParamMap{{"message", "m" + std::to_string(i)}, {"recipient", word(rng)}}; },
       [](const std::string& id, int, std::mt19937_64&) { return ParamMap{{"id", id}}; },
       [](const ParamMap& p) {
         json j = json::object();
         if (p.count("message")) j["message"] = p.at("message"), j["recipient"] = p.at("recipient"), j["read"] = false;
         else j["read"] = true;
         return j;
       }},
      {"calendar", "add_event", "view_event", "remove_event", "update_event",
       [&](int i, std::mt19937_64& rng) { return ParamMap{{"title", "e" + std::to_string(i)}, {"date", date(rng)}}; },
       [&](const std::string& id, int i, std::mt19937_64& rng) {
         ParamMap p{{"id", id}, {"title", "r" + std::to_string(i)}};
         if (rng() % 2) p["date"] = date(rng);
         return p;
       },
       project({"title", "date"})},
  };
  std::uint64_t seed = 100;
  for (const auto& m : models) RunStoreModel(c, m, seed++);

  // Email: deletion is a state change, so its model tracks drafts and sends.
  {
    Executor ex;
    std::mt19937_64 rng(seed++);
    std::map<std::uint64_t, std::string> state;  // id -> draft|sent
    std::uint64_t next = 1;
    for (int i = 0; i < 10000; ++i) {
      const int op = static_cast<int>(rng() % 10);
      const std::uint64_t key = 1 + rng() % (next + 1);
      const std::string id = std::to_string(key);
      auto it = state.find(key);
      if (op < 4) {
        auto r = ex.Run("email", "compose_email", {{"to", word(rng)}, {"subject", "s" + std::to_string(i)}});
        c.Expect(r.status == ExecStatus::kOk && r.payload->at("id") == std::to_string(next), "email compose id");
        state[next++] = "draft";
      } else if (op < 6) {
        auto r = ex.Run("email", "send_email", {{"id", id}});
        const bool want = it != state.end() && it->second == "draft";
        c.Expect((r.status == ExecStatus::kOk) == want, "email send " + id + ": " + r.message);
        if (want) it->second = "sent";
      } else if (op < 7) {
        auto r = ex.Run("email", "reply_email", {{"id", id}, {"body", "b"}});
        c.Expect((r.status == ExecStatus::kOk) == (it != state.end()), "email reply " + id);
        if (it != state.end()) state[next++] = "sent";
      } else {
        auto r = ex.Run("email", "delete_email", {{"id", id}});
        c.Expect((r.status == ExecStatus::kOk) == (state.erase(key) > 0), "email delete " + id);
      }
    }
    auto listed = ex.Run("email", "read_email");
    c.Expect(listed.payload->size() == state.size(), "email final size");
    for (const auto& rec : *listed.payload) {
      auto it = state.find(std::stoull(rec.at("id").get<std::string>()));
      c.Expect(it != state.end() && rec.at("state") == it->second, "email state of " + rec.at("id").get<std::string>());
    }
  }

  // Concurrent creates through the executor.
  const std::vector<std::pair<std::string, std::pair<std::string, ParamMap>>> creators = {
      {"notes", {"create", {{"content", "x"}}}},
      {"notification", {"send_notification", {{"message", "x"}}}},
      {"email", {"compose_email", {{"to", "x"}}}},
      {"calendar", {"add_event", {{"title", "x"}, {"date", "2024-05-05"}}}}};
  for (const auto& [module, call] : creators) {
    Executor ex;
    std::vector<std::vector<std::string>> ids(8);
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 100; ++i) {
          auto r = ex.Run(module, call.first, call.second);
          if (r.status == ExecStatus::kOk) ids[t].push_back(r.payload->at("id").get<std::string>());
        }
      });
    }
    for (auto& t : threads) t.join();
    std::set<std::string> distinct;
    for (const auto& v : ids) distinct.insert(v.begin(), v.end());
    c.Expect(distinct.size() == 800, module + " concurrent ids " + std::to_string(distinct.size()));
  }
  c.note = "10000 ops on each of 4 stores; 8x100 concurrent creates give 800 ids per store";
}

std::string Repr(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CalculatorOracle(Check& c) {
  Executor ex;
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> wide(-1e6, 1e6), unit(-10, 10), pos(1e-6, 1e6);
  const std::vector<std::string> fns = {"add", "subtract", "multiply", "divide", "power",
                                        "log", "factorial", "sin", "cos", "tan"};
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::string& fn = fns[static_cast<std::size_t>(i) % fns.size()];
    ParamMap p;
    double want = 0;
    if (fn == "power") {
      const double a = std::abs(unit(rng)) + 0.5, b = unit(rng);
      p = {{"a", Repr(a)}, {"b", Repr(b)}};
      want = std::pow(a, b);
    } else if (fn == "log") {
      const double x = pos(rng);
      double base = 1 + std::abs(unit(rng)) + 0.01;
      if (rng() % 3 == 0) {
        p = {{"x", Repr(x)}};
        want = std::log(x);
      } else {
        p = {{"x", Repr(x)}, {"base", Repr(base)}};
        want = std::log(x) / std::log(base);
      }
    } else if (fn == "factorial") {
      const int n = static_cast<int>(rng() % 21);
      p = {{"n", std::to_string(n)}};
      want = oracle::Factorial(n);
    } else if (fn == "sin" || fn == "cos" || fn == "tan") {
      const double x = unit(rng);
      p = {{"x", Repr(x)}};
      want = oracle::Calc(fn, x, 0);
    } else {
      const double a = wide(rng);
      double b = wide(rng);
      if (fn == "divide" && b == 0) b = 1;
      p = {{"a", Repr(a)}, {"b", Repr(b)}};
      want = oracle::Calc(fn, a, b);
    }
    auto r = ex.Run("calculator", fn, p);
    if (r.status != ExecStatus::kOk) {
      c.Expect(false, fn + " failed: " + r.message);
      continue;
    }
    const double got = r.payload->get<double>();
    const double err = want == 0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
    worst = std::max(worst, err);
    c.Expect(want == 0 ? got == 0 : err <= 1e-9, fn + " " + Repr(got) + " vs " + Repr(want));
  }

  struct Domain {
    std::string fn;
    ParamMap params;
    std::string message;
  };
  const std::vector<Domain> domains = {
      {"divide", {{"a", "1"}, {"b", "0"}}, "division by zero"},
      {"divide", {{"a", "0"}, {"b", "0"}}, "division by zero"},
      {"log", {{"x", "0"}}, "logarithm of a non-positive number"},
      {"log", {{"x", "-3"}}, "logarithm of a non-positive number"},
      {"log", {{"x", "-3"}, {"base", "10"}}, "logarithm of a non-positive number"},
      {"factorial", {{"n", "21"}}, "factorial argument exceeds 20"},
      {"factorial", {{"n", "170"}}, "factorial argument exceeds 20"},
      {"factorial", {{"n", "-1"}}, "factorial of a negative number"},
  };
  for (const auto& d : domains) {
    auto r = ex.Run("calculator", d.fn, d.params);
    c.Expect(r.status == ExecStatus::kExecError && r.message == d.message && !r.payload,
             d.fn + " domain error: " + r.message);
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "10000 inputs, worst relative error %.3g; %zu error domains", worst, domains.size());
  c.note = buf;
}

void ReviewRate(Check& c) {
  const Registry registry = Registry::Default();
  testing::TempDir dir;
  std::map<std::string, int> totals;
  for (const auto& m : registry.modules()) totals[m.name] = m.name == "routes_not_exist" ? 100 : 150;
  TemplateGenerationBackend backend(5);
  Dataset dataset = RunPlan(AllocatePlan(registry, totals), backend, registry);
  c.Expect(dataset.records.size() == 1000, "dataset has " + std::to_string(dataset.records.size()));
  WriteDataset(dir / "review.json", dataset);

  std::vector<ReviewDecision> decisions;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) decisions.push_back({i, i != 500, i == 500 ? "off topic" : ""});
  const ReviewStats session = ReviewSession(dataset, decisions);
  c.Expect(session.accepted == 999 && session.rejected == 1, "session counts");
  c.Expect(session.acceptance_rate() == 0.999, "session rate " + Opt(session.acceptance_rate()));

  // The same decisions through the persisted cursor.
  {
    ReviewCursor cursor(dir / "review.json", registry);
    for (const auto& d : decisions) cursor.Decide(d);
    cursor.Save();
  }
  const Dataset saved = ReadDataset(dir / "review.json", registry);
  const ReviewStats totals_saved = ReviewTotals(saved);
  c.Expect(totals_saved.acceptance_rate() == 0.999, "saved rate " + Opt(totals_saved.acceptance_rate()));
  c.Expect(saved.records[500].review == ReviewState::kRejected && saved.records[500].rejection_reason == "off topic",
           "rejection not persisted");
  c.Expect(saved.Accepted().records.size() == 999, "accepted subset");
  c.note = "999 accepted, 1 rejected, acceptance_rate " + Opt(totals_saved.acceptance_rate());
}

}  // namespace
}  // namespace nlapi

int main() {
  spdlog::set_level(spdlog::level::off);
  const std::vector<std::pair<std::string, std::function<void(nlapi::Check&)>>> checks = {
      {"metric engine matches counting oracle", nlapi::MetricOracle},
      {"function accuracy is null without module hits", nlapi::FlcNull},
      {"reference comparison table reproduces", nlapi::ReferenceReport},
      {"offline template/mock loop scores 1.000", nlapi::OfflineLoop},
      {"dataset batches, validation and plan counts", nlapi::DatasetMechanics},
      {"gateway serves 10k fuzzed queries without 500", nlapi::GatewayFuzz},
      {"cache hit within ttl, miss after expiry", nlapi::CacheContract},
      {"round robin splits 300 requests evenly", nlapi::RoundRobin},
      {"entity stores match reference model", nlapi::CrudLinearizable},
      {"calculator matches direct arithmetic", nlapi::CalculatorOracle},
      {"review decisions yield acceptance rate", nlapi::ReviewRate},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    nlapi::Check check;
    try {
      fn(check);
    } catch (const std::exception& e) {
      check.Expect(false, std::string("threw: ") + e.what());
    }
    if (check.ok()) {
      std::printf("PASS %s: %s\n", name.c_str(), check.note.c_str());
    } else {
      ++failed;
      std::printf("FAIL %s: %s\n", name.c_str(), check.Summary().c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d/%zu passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}
