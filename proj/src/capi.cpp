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
#include "nlapi/nlapi.h"

#include <cstdlib>
#include <cstring>
#include <fstream>

#include <spdlog/spdlog.h>

#include "backends.hpp"
#include "datagen.hpp"
#include "error.hpp"
#include "evalharness.hpp"
#include "gateway.hpp"
#include "hierarchy.hpp"
#include "http_server.hpp"
#include "mock_rules.hpp"

using nlohmann::json;
using namespace nlapi;

struct nlapi_registry {
  std::shared_ptr<const Registry> registry;
};

struct nlapi_gateway {
  GatewayConfig config;
  std::shared_ptr<Gateway> gateway;
};

struct nlapi_server {
  std::unique_ptr<HttpServer> server;
};

struct nlapi_review {
  std::shared_ptr<const Registry> registry;
  std::unique_ptr<ReviewCursor> cursor;
};

namespace {

thread_local std::string g_last_error;

nlapi_status StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return NLAPI_ERR_INVALID_ARGUMENT;
    case ErrorCode::kMalformedDocument: return NLAPI_ERR_MALFORMED_DOCUMENT;
    case ErrorCode::kDuplicateName: return NLAPI_ERR_DUPLICATE_NAME;
    case ErrorCode::kMissingReservedLabel: return NLAPI_ERR_MISSING_RESERVED_LABEL;
    case ErrorCode::kInvalidRegistry: return NLAPI_ERR_INVALID_REGISTRY;
    case ErrorCode::kEmptyQuery: return NLAPI_ERR_EMPTY_QUERY;
    case ErrorCode::kQueryTooLong: return NLAPI_ERR_QUERY_TOO_LONG;
    case ErrorCode::kClassificationUnavailable: return NLAPI_ERR_CLASSIFICATION_UNAVAILABLE;
    case ErrorCode::kBackendUnavailable: return NLAPI_ERR_BACKEND_UNAVAILABLE;
    case ErrorCode::kGenerationDegraded: return NLAPI_ERR_GENERATION_DEGRADED;
    case ErrorCode::kAssembly: return NLAPI_ERR_ASSEMBLY;
    case ErrorCode::kDuplicateDecision: return NLAPI_ERR_DUPLICATE_DECISION;
    case ErrorCode::kConflict: return NLAPI_ERR_CONFLICT;
    case ErrorCode::kIo: return NLAPI_ERR_IO;
    case ErrorCode::kInternal: return NLAPI_ERR_INTERNAL;
  }
  return NLAPI_ERR_INTERNAL;
}

nlapi_status Fail(nlapi_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs fn and converts exceptions into a status plus the thread's last error.
template <typename Fn>
nlapi_status Call(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const Error& e) {
    return Fail(StatusFor(e.code()), e.what());
  } catch (const json::exception& e) {
    return Fail(NLAPI_ERR_MALFORMED_DOCUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return Fail(NLAPI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(NLAPI_ERR_INTERNAL, e.what());
  }
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void Put(char** out, const std::string& s) {
  if (out) *out = Dup(s);
}

std::string Dump(const json& j, int indent = -1) {
  return j.dump(indent, ' ', false, json::error_handler_t::replace);
}

bool Empty(const char* s) { return s == nullptr || *s == '\0'; }

void Require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

std::shared_ptr<const Registry> LoadRegistry(const char* path) {
  return std::make_shared<const Registry>(Empty(path) ? Registry::Default() : Registry::FromFile(path));
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, path + " is not valid JSON: " + e.what());
  }
}

// Backend specs from a gateway config, {"backends": [...]} or a bare array.
std::vector<BackendSpec> LoadBackendSpecs(const char* path) {
  std::vector<BackendSpec> specs;
  if (Empty(path)) return specs;
  const json doc = ReadJsonFile(path);
  const json* list = &doc;
  if (doc.is_object() && doc.contains("pool")) list = &doc.at("pool").at("backends");
  else if (doc.is_object() && doc.contains("backends")) list = &doc.at("backends");
  if (!list->is_array()) throw Error(ErrorCode::kInvalidArgument, std::string(path) + " lists no backends");
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  for (const auto& b : *list) {
    BackendSpec spec = BackendSpec::FromJson(b);
    if (!spec.ruleset_path.empty() && std::filesystem::path(spec.ruleset_path).is_relative()) {
      spec.ruleset_path = (base / spec.ruleset_path).string();
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

BackendSpec ResolveBackend(const char* backend_id, const char* config_path) {
  if (Empty(backend_id)) throw Error(ErrorCode::kInvalidArgument, "backend id is required");
  for (auto& s : LoadBackendSpecs(config_path)) {
    if (s.id == backend_id) return s;
  }
  if (std::strcmp(backend_id, "mock") == 0) {
    BackendSpec mock;
    mock.id = "mock";
    mock.kind = BackendKind::kMockRules;
    return mock;
  }
  throw Error(ErrorCode::kInvalidArgument, std::string("unknown backend '") + backend_id +
                                               "'; define it in the file passed as config");
}

json ErrorBody(ErrorCode code, const std::string& message) {
  return {{"error", {{"code", ToString(code)}, {"message", message}}}};
}

}  // namespace

extern "C" {

const char* nlapi_version(void) { return "0.1.0"; }

const char* nlapi_status_name(nlapi_status status) {
  switch (status) {
    case NLAPI_OK: return "ok";
    case NLAPI_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case NLAPI_ERR_MALFORMED_DOCUMENT: return "malformed_document";
    case NLAPI_ERR_DUPLICATE_NAME: return "duplicate_name";
    case NLAPI_ERR_MISSING_RESERVED_LABEL: return "missing_reserved_label";
    case NLAPI_ERR_INVALID_REGISTRY: return "invalid_registry";
    case NLAPI_ERR_EMPTY_QUERY: return "empty_query";
    case NLAPI_ERR_QUERY_TOO_LONG: return "query_too_long";
    case NLAPI_ERR_CLASSIFICATION_UNAVAILABLE: return "classification_unavailable";
    case NLAPI_ERR_BACKEND_UNAVAILABLE: return "backend_unavailable";
    case NLAPI_ERR_GENERATION_DEGRADED: return "generation_degraded";
    case NLAPI_ERR_ASSEMBLY: return "assembly";
    case NLAPI_ERR_DUPLICATE_DECISION: return "duplicate_decision";
    case NLAPI_ERR_CONFLICT: return "conflict";
    case NLAPI_ERR_IO: return "io";
    case NLAPI_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* nlapi_last_error(void) { return g_last_error.c_str(); }

void nlapi_string_free(char* s) { std::free(s); }

nlapi_status nlapi_set_log_level(const char* level) {
  return Call([&] {
    Require(level, "level");
    const auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && std::strcmp(level, "off") != 0) {
      throw Error(ErrorCode::kInvalidArgument, std::string("unknown log level '") + level + "'");
    }
    spdlog::set_level(parsed);
    return NLAPI_OK;
  });
}

nlapi_status nlapi_registry_load(const char* path, nlapi_registry** out) {
  return Call([&] {
    Require(out, "out");
    *out = new nlapi_registry{LoadRegistry(path)};
    return NLAPI_OK;
  });
}

nlapi_status nlapi_registry_from_json(const char* text, nlapi_registry** out) {
  return Call([&] {
    Require(text, "json");
    Require(out, "out");
    *out = new nlapi_registry{std::make_shared<const Registry>(Registry::FromJsonText(text))};
    return NLAPI_OK;
  });
}

nlapi_status nlapi_registry_to_json(const nlapi_registry* registry, char** out_json) {
  return Call([&] {
    Require(registry, "registry");
    Require(out_json, "out_json");
    Put(out_json, Dump(registry->registry->ToJson(), 2));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_registry_digest(const nlapi_registry* registry, char** out_text) {
  return Call([&] {
    Require(registry, "registry");
    Require(out_text, "out_text");
    Put(out_text, RegistryDigest(*registry->registry));
    return NLAPI_OK;
  });
}

int64_t nlapi_registry_version(const nlapi_registry* registry) {
  return registry ? registry->registry->version() : -1;
}

void nlapi_registry_free(nlapi_registry* registry) { delete registry; }

nlapi_status nlapi_gateway_open(const char* config_path, nlapi_gateway** out) {
  return Call([&] {
    Require(out, "out");
    GatewayConfig config = Empty(config_path) ? GatewayConfig::FromJson(json::object()) : GatewayConfig::FromFile(config_path);
    std::shared_ptr<Gateway> gw = Gateway::FromConfig(config);
    *out = new nlapi_gateway{std::move(config), std::move(gw)};
    return NLAPI_OK;
  });
}

nlapi_status nlapi_gateway_open_json(const char* config_json, const char* base_dir, nlapi_gateway** out) {
  return Call([&] {
    Require(config_json, "config_json");
    Require(out, "out");
    GatewayConfig config = GatewayConfig::FromJson(json::parse(config_json), Empty(base_dir) ? "" : base_dir);
    std::shared_ptr<Gateway> gw = Gateway::FromConfig(config);
    *out = new nlapi_gateway{std::move(config), std::move(gw)};
    return NLAPI_OK;
  });
}

void nlapi_gateway_free(nlapi_gateway* gateway) { delete gateway; }

nlapi_status nlapi_gateway_query(nlapi_gateway* gateway, const char* text, const char* session_id,
                                 int* out_http_status, char** out_json) {
  return Call([&] {
    Require(gateway, "gateway");
    Require(text, "text");
    Require(session_id, "session_id");
    try {
      QueryResponse response = gateway->gateway->HandleQuery({text, session_id});
      if (out_http_status) *out_http_status = 200;
      Put(out_json, Dump(response.ToJson()));
      return NLAPI_OK;
    } catch (const Error& e) {
      if (out_http_status) *out_http_status = HttpStatusFor(e.code());
      Put(out_json, Dump(ErrorBody(e.code(), e.what())));
      return Fail(StatusFor(e.code()), e.what());
    }
  });
}

nlapi_status nlapi_gateway_history(nlapi_gateway* gateway, const char* session_id, int limit, const int64_t* before,
                                   char** out_json) {
  return Call([&] {
    Require(gateway, "gateway");
    Require(session_id, "session_id");
    Require(out_json, "out_json");
    std::optional<std::int64_t> b;
    if (before) b = *before;
    json entries = json::array();
    for (const auto& e : gateway->gateway->GetHistory(session_id, limit, b)) entries.push_back(e.ToJson());
    Put(out_json, Dump({{"session_id", session_id}, {"entries", entries}}));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_gateway_health(nlapi_gateway* gateway, char** out_json) {
  return Call([&] {
    Require(gateway, "gateway");
    Require(out_json, "out_json");
    Put(out_json, Dump(gateway->gateway->Health().ToJson()));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_gateway_set_pool(nlapi_gateway* gateway, const char* pool_json) {
  return Call([&] {
    Require(gateway, "gateway");
    Require(pool_json, "pool_json");
    json body = json::parse(pool_json);
    const json& pool = body.contains("pool") ? body.at("pool") : body;
    const PoolPolicy policy = ParsePoolPolicy(pool.value("policy", std::string("round_robin")));
    std::vector<BackendSpec> specs;
    for (const auto& b : pool.at("backends")) specs.push_back(BackendSpec::FromJson(b));
    gateway->gateway->SetPool(specs, policy);
    return NLAPI_OK;
  });
}

uint64_t nlapi_gateway_classifier_invocations(const nlapi_gateway* gateway) {
  return gateway ? gateway->gateway->classifier_invocations() : 0;
}

nlapi_status nlapi_server_create(nlapi_gateway* gateway, const char* host, int port, nlapi_server** out) {
  return Call([&] {
    Require(gateway, "gateway");
    Require(out, "out");
    auto [config_host, config_port] = gateway->config.ListenAddress();
    auto server = std::make_unique<HttpServer>(gateway->gateway);
    server->Bind(Empty(host) ? config_host : std::string(host), port < 0 ? config_port : port);
    *out = new nlapi_server{std::move(server)};
    return NLAPI_OK;
  });
}

int nlapi_server_port(const nlapi_server* server) { return server ? server->server->port() : -1; }

nlapi_status nlapi_server_start(nlapi_server* server) {
  return Call([&] {
    Require(server, "server");
    server->server->Start();
    return NLAPI_OK;
  });
}

void nlapi_server_stop(nlapi_server* server) {
  if (server) server->server->Stop();
}

void nlapi_server_free(nlapi_server* server) { delete server; }

nlapi_status nlapi_datagen_generate(const nlapi_generate_options* options, char** out_summary_json) {
  return Call([&] {
    Require(options, "options");
    if (Empty(options->out_path)) throw Error(ErrorCode::kInvalidArgument, "out_path is required");
    auto registry = LoadRegistry(options->registry_path);
    const auto plan = Empty(options->plan_path) ? DefaultPlan(*registry)
                                                : PlanFromJson(ReadJsonFile(options->plan_path), *registry);
    PlanOptions plan_options;
    plan_options.batch_size = options->batch_size > 0 ? options->batch_size : kDefaultBatchSize;
    plan_options.allow_partial = options->allow_partial != 0;

    std::unique_ptr<GenerationBackend> backend;
    const std::string id = Empty(options->backend_id) ? "template" : options->backend_id;
    if (id == "template") {
      backend = std::make_unique<TemplateGenerationBackend>(options->seed);
    } else {
      BackendSpec spec = ResolveBackend(id.c_str(), options->config_path);
      if (spec.kind != BackendKind::kChatHttp) {
        throw Error(ErrorCode::kInvalidArgument, "backend " + id + " cannot generate text; use a chat_http backend");
      }
      auto transport = DefaultTransportFactory()(spec);
      backend = std::make_unique<ChatGenerationBackend>(std::move(spec), std::move(transport));
    }
    Dataset dataset = RunPlan(plan, *backend, *registry, plan_options);
    WriteDataset(options->out_path, dataset);
    if (out_summary_json) Put(out_summary_json, Dump(DatasetStatsJson(dataset, *registry), 2));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_datagen_stats(const char* registry_path, const char* dataset_path, char** out_json) {
  return Call([&] {
    Require(dataset_path, "dataset_path");
    Require(out_json, "out_json");
    auto registry = LoadRegistry(registry_path);
    Put(out_json, Dump(DatasetStatsJson(ReadDataset(dataset_path, *registry), *registry), 2));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_review_open(const char* dataset_path, const char* registry_path, nlapi_review** out) {
  return Call([&] {
    Require(dataset_path, "dataset_path");
    Require(out, "out");
    auto registry = LoadRegistry(registry_path);
    auto cursor = std::make_unique<ReviewCursor>(dataset_path, *registry);
    *out = new nlapi_review{std::move(registry), std::move(cursor)};
    return NLAPI_OK;
  });
}

int64_t nlapi_review_next(const nlapi_review* review) {
  if (!review) return -1;
  auto next = review->cursor->NextUnreviewed();
  return next ? static_cast<int64_t>(*next) : -1;
}

nlapi_status nlapi_review_record(const nlapi_review* review, int64_t index, char** out_json) {
  return Call([&] {
    Require(review, "review");
    Require(out_json, "out_json");
    if (index < 0 || static_cast<std::size_t>(index) >= review->cursor->dataset().records.size()) {
      throw Error(ErrorCode::kInvalidArgument, "record index out of range");
    }
    json j = review->cursor->record(static_cast<std::size_t>(index)).ToJson();
    j["index"] = index;
    Put(out_json, Dump(j));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_review_decide(nlapi_review* review, int64_t index, int accept, const char* reason) {
  return Call([&] {
    Require(review, "review");
    if (index < 0) throw Error(ErrorCode::kInvalidArgument, "record index out of range");
    review->cursor->Decide({static_cast<std::size_t>(index), accept != 0, Empty(reason) ? "" : reason});
    return NLAPI_OK;
  });
}

nlapi_status nlapi_review_stats(const nlapi_review* review, char** out_json) {
  return Call([&] {
    Require(review, "review");
    Require(out_json, "out_json");
    const auto& ds = review->cursor->dataset();
    std::size_t remaining = 0;
    for (const auto& r : ds.records) remaining += r.review == ReviewState::kUnreviewed ? 1 : 0;
    Put(out_json, Dump({{"session", review->cursor->session_stats().ToJson()},
                        {"dataset", ReviewTotals(ds).ToJson()},
                        {"resumed", review->cursor->resumed()},
                        {"remaining", remaining}}));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_review_save(nlapi_review* review) {
  return Call([&] {
    Require(review, "review");
    review->cursor->Save();
    return NLAPI_OK;
  });
}

void nlapi_review_free(nlapi_review* review) { delete review; }

nlapi_status nlapi_review_apply(const char* dataset_path, const char* registry_path, const char* decisions_json,
                                char** out_stats_json) {
  return Call([&] {
    Require(dataset_path, "dataset_path");
    Require(decisions_json, "decisions_json");
    auto registry = LoadRegistry(registry_path);
    const json doc = json::parse(decisions_json);
    if (!doc.is_array()) throw Error(ErrorCode::kInvalidArgument, "decisions must be a JSON array");
    std::vector<ReviewDecision> decisions;
    for (const auto& d : doc) {
      ReviewDecision decision;
      decision.index = d.at("index").get<std::size_t>();
      const std::string verdict = d.at("decision").get<std::string>();
      if (verdict != "accept" && verdict != "reject") {
        throw Error(ErrorCode::kInvalidArgument, "decision must be accept or reject, got '" + verdict + "'");
      }
      decision.accept = verdict == "accept";
      decision.reason = d.value("reason", std::string());
      decisions.push_back(std::move(decision));
    }
    Dataset dataset = ReadDataset(dataset_path, *registry);
    const ReviewStats stats = ReviewSession(dataset, decisions);
    WriteDataset(dataset_path, dataset);
    if (out_stats_json) Put(out_stats_json, Dump(stats.ToJson()));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_eval_run(const nlapi_eval_options* options, char** out_summary_json) {
  return Call([&] {
    Require(options, "options");
    if (Empty(options->dataset_path) || Empty(options->out_path)) {
      throw Error(ErrorCode::kInvalidArgument, "dataset_path and out_path are required");
    }
    auto registry = LoadRegistry(options->registry_path);
    const BackendSpec spec = ResolveBackend(options->backend_id, options->config_path);
    auto classifier = MakeClassifier(spec, DefaultTransportFactory());
    RunOptions run;
    run.workers = options->workers > 0 ? options->workers : 4;
    const std::string records = Empty(options->records) ? "accepted" : options->records;
    if (records == "accepted") {
      run.filter = RecordFilter::kAccepted;
    } else if (records == "not_rejected") {
      run.filter = RecordFilter::kNotRejected;
    } else if (records == "all") {
      run.filter = RecordFilter::kAll;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "records must be accepted, not_rejected or all");
    }
    const Dataset dataset = ReadDataset(options->dataset_path, *registry);
    const auto preds = RunPredictions(dataset, *classifier, spec.id, *registry, options->out_path, run);
    if (out_summary_json) Put(out_summary_json, Dump(BuildReport(spec.id, preds, *registry).ToJson(), 2));
    return NLAPI_OK;
  });
}

nlapi_status nlapi_eval_score(const char* const* prediction_paths, size_t count, const char* registry_path,
                              const char* format, char** out_text) {
  return Call([&] {
    Require(out_text, "out_text");
    if (count > 0) Require(prediction_paths, "prediction_paths");
    std::vector<std::filesystem::path> paths(prediction_paths, prediction_paths + count);
    auto registry = LoadRegistry(registry_path);
    const ReportSet set = BuildReportSet(paths, *registry);
    const std::string fmt = Empty(format) ? "table" : format;
    if (fmt == "table") {
      Put(out_text, set.table);
    } else if (fmt == "json") {
      Put(out_text, Dump(set.json, 2));
    } else {
      throw Error(ErrorCode::kInvalidArgument, "format must be table or json");
    }
    return NLAPI_OK;
  });
}

nlapi_status nlapi_eval_select(const char* const* prediction_paths, size_t count, const char* registry_path,
                               const char* config_path, char** out_backend_id, char** out_pool_config_json) {
  return Call([&] {
    Require(out_backend_id, "out_backend_id");
    if (count > 0) Require(prediction_paths, "prediction_paths");
    std::vector<std::filesystem::path> paths(prediction_paths, prediction_paths + count);
    auto registry = LoadRegistry(registry_path);
    const ReportSet set = BuildReportSet(paths, *registry);
    const std::string winner = SelectBest(set.reports);
    const std::string fragment = Dump(PoolConfigFragment(winner, LoadBackendSpecs(config_path)), 2);
    Put(out_backend_id, winner);
    if (out_pool_config_json) Put(out_pool_config_json, fragment);
    return NLAPI_OK;
  });
}

}  // extern "C"
