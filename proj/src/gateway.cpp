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
#include "gateway.hpp"

#include <algorithm>
#include <charconv>
#include <random>

#include <spdlog/spdlog.h>

#include "error.hpp"
#include "mock_rules.hpp"
#include "text.hpp"

namespace nlapi {

using nlohmann::json;

namespace {

std::string ResolvePath(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty()) return p;
  std::filesystem::path path(p);
  return path.is_absolute() ? p : (base / path).string();
}

ExecStatus ParseExecStatus(std::string_view s) {
  for (auto st : {ExecStatus::kOk, ExecStatus::kInvalidRoute, ExecStatus::kMissingParam, ExecStatus::kBadParam,
                  ExecStatus::kExecError}) {
    if (ToString(st) == s) return st;
  }
  throw Error(ErrorCode::kMalformedDocument, "unknown status '" + std::string(s) + "'");
}

json LabelJson(const Label& l) { return json::array({l.module, l.function}); }

std::int64_t MicrosSinceEpoch(TimePoint t) {
  return std::chrono::duration_cast<std::chrono::microseconds>(t.time_since_epoch()).count();
}

}  // namespace

GatewayConfig GatewayConfig::FromJson(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "gateway config must be an object");
  GatewayConfig c;
  try {
    c.listen = j.value("listen", c.listen);
    c.registry_path = ResolvePath(j.value("registry_path", std::string()), base_dir);
    if (j.contains("cache")) {
      const json& cache = j.at("cache");
      const std::int64_t ttl = cache.value("ttl_s", std::int64_t{300});
      const std::int64_t cap = cache.value("capacity", static_cast<std::int64_t>(TtlLruCache::kDefaultCapacity));
      if (ttl < 0) throw Error(ErrorCode::kInvalidArgument, "cache.ttl_s must be >= 0");
      if (cap < 1) throw Error(ErrorCode::kInvalidArgument, "cache.capacity must be >= 1");
      c.cache_ttl = std::chrono::seconds(ttl);
      c.cache_capacity = static_cast<std::size_t>(cap);
      c.cache_external_url = cache.value("external_url", std::string());
    }
    if (j.contains("pool")) {
      const json& pool = j.at("pool");
      c.policy = ParsePoolPolicy(pool.value("policy", std::string("round_robin")));
      for (const auto& b : pool.value("backends", json::array())) {
        BackendSpec spec = BackendSpec::FromJson(b);
        spec.ruleset_path = ResolvePath(spec.ruleset_path, base_dir);
        c.backends.push_back(std::move(spec));
      }
    }
    if (j.contains("history")) c.history_path = ResolvePath(j.at("history").value("path", std::string()), base_dir);
    if (j.contains("weather")) {
      c.weather_fixture_path = ResolvePath(j.at("weather").value("fixture_path", std::string()), base_dir);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("invalid gateway config: ") + e.what());
  }
  if (c.backends.empty()) {
    BackendSpec mock;
    mock.id = "mock";
    mock.kind = BackendKind::kMockRules;
    c.backends.push_back(std::move(mock));
  }
  c.ListenAddress();
  return c;
}

GatewayConfig GatewayConfig::FromFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return FromJson(j, path.parent_path());
}

json GatewayConfig::ToJson() const {
  json backends_json = json::array();
  for (const auto& b : backends) backends_json.push_back(b.ToJson());
  json j = {{"listen", listen},
            {"cache", {{"ttl_s", cache_ttl.count()}, {"capacity", cache_capacity}}},
            {"pool", {{"policy", std::string(ToString(policy))}, {"backends", backends_json}}}};
  if (!registry_path.empty()) j["registry_path"] = registry_path;
  if (!cache_external_url.empty()) j["cache"]["external_url"] = cache_external_url;
  if (!history_path.empty()) j["history"] = {{"path", history_path}};
  if (!weather_fixture_path.empty()) j["weather"] = {{"fixture_path", weather_fixture_path}};
  return j;
}

std::pair<std::string, int> GatewayConfig::ListenAddress() const {
  auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::kInvalidArgument, "listen must be host:port, got '" + listen + "'");
  }
  int port = -1;
  const char* first = listen.data() + colon + 1;
  const char* last = listen.data() + listen.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port < 0 || port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bad listen port in '" + listen + "'");
  }
  return {listen.substr(0, colon), port};
}

bool IsValidSessionId(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

QueryRequest QueryRequest::FromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
  auto text = j.find("text");
  auto session = j.find("session_id");
  if (text == j.end() || !text->is_string()) throw Error(ErrorCode::kInvalidArgument, "'text' must be a string");
  if (session == j.end() || !session->is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "'session_id' must be a string");
  }
  return {text->get<std::string>(), session->get<std::string>()};
}

json QueryResponse::ToJson() const {
  return {{"label", LabelJson(label)},
          {"params", params},
          {"result", result.ToJson()},
          {"cached", cached},
          {"backend_id", backend_id},
          {"latency_ms", latency.count()},
          {"request_id", request_id}};
}

json HistoryEntry::ToJson() const {
  return {{"request_id", request_id}, {"session_id", session_id}, {"timestamp", timestamp_us},
          {"query", query},           {"label", LabelJson(label)}, {"status", std::string(ToString(status))},
          {"message", message}};
}

HistoryEntry HistoryEntry::FromJson(const json& j) {
  try {
    HistoryEntry e;
    e.request_id = j.at("request_id").get<std::string>();
    e.session_id = j.at("session_id").get<std::string>();
    e.timestamp_us = j.at("timestamp").get<std::int64_t>();
    e.query = j.at("query").get<std::string>();
    const json& label = j.at("label");
    e.label = {label.at(0).get<std::string>(), label.at(1).get<std::string>()};
    e.status = ParseExecStatus(j.at("status").get<std::string>());
    e.message = j.value("message", std::string());
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kMalformedDocument, std::string("bad history entry: ") + ex.what());
  }
}

json HealthReport::ToJson() const {
  json list = json::array();
  for (const auto& b : backends) list.push_back({{"id", b.id}, {"reachable", b.reachable}});
  return {{"status", status}, {"registry_version", registry_version}, {"backends", list}};
}

Gateway::Gateway(GatewayDeps deps, const std::vector<BackendSpec>& specs, PoolPolicy policy)
    : registry_(deps.registry ? deps.registry : std::make_shared<const Registry>(Registry::Default())),
      clock_(deps.clock ? deps.clock : std::make_shared<const SystemClock>()),
      cache_(deps.cache),
      weather_(deps.weather ? deps.weather : FixtureWeatherProvider::Default()),
      factory_(deps.classifier_factory),
      history_path_(deps.history_path) {
  if (!cache_) {
    cache_ = std::make_shared<TtlLruCache>(TtlLruCache::kDefaultCapacity, TtlLruCache::kDefaultTtl, clock_);
  }
  if (!factory_) {
    factory_ = [transports = DefaultTransportFactory()](const BackendSpec& spec) {
      return MakeClassifier(spec, transports);
    };
  }
  std::random_device rd;
  request_nonce_ = rd();
  SetPool(specs, policy);
  LoadHistory();
}

std::unique_ptr<Gateway> Gateway::FromConfig(const GatewayConfig& config, GatewayDeps overrides) {
  GatewayDeps deps = std::move(overrides);
  if (!deps.registry) {
    deps.registry = std::make_shared<const Registry>(
        config.registry_path.empty() ? Registry::Default() : Registry::FromFile(config.registry_path));
  }
  if (!deps.clock) deps.clock = std::make_shared<const SystemClock>();
  if (!deps.cache) {
    if (!config.cache_external_url.empty()) {
      deps.cache = std::make_shared<RedisCache>(config.cache_external_url, config.cache_ttl);
    } else {
      deps.cache = std::make_shared<TtlLruCache>(config.cache_capacity, config.cache_ttl, deps.clock);
    }
  }
  if (!deps.weather && !config.weather_fixture_path.empty()) {
    deps.weather = std::make_shared<const FixtureWeatherProvider>(
        FixtureWeatherProvider::FromFile(config.weather_fixture_path));
  }
  if (deps.history_path.empty()) deps.history_path = config.history_path;
  return std::make_unique<Gateway>(std::move(deps), config.backends, config.policy);
}

void Gateway::SetPool(const std::vector<BackendSpec>& specs, PoolPolicy policy) {
  if (specs.empty()) throw Error(ErrorCode::kInvalidArgument, "backend pool must not be empty");
  std::vector<BackendPool::Member> members;
  members.reserve(specs.size());
  for (const auto& spec : specs) {
    for (const auto& m : members) {
      if (m.spec.id == spec.id) throw Error(ErrorCode::kConflict, "duplicate backend id '" + spec.id + "'");
    }
    members.push_back({spec, factory_(spec)});
  }
  auto pool = std::make_shared<BackendPool>(std::move(members), policy);
  std::lock_guard lock(pool_mu_);
  pool_ = std::move(pool);
}

std::shared_ptr<BackendPool> Gateway::pool() const {
  std::lock_guard lock(pool_mu_);
  return pool_;
}

std::string Gateway::NextRequestId() {
  char buf[40];
  const auto n = request_counter_.fetch_add(1) + 1;
  std::snprintf(buf, sizeof(buf), "%08x-%012llx", request_nonce_, static_cast<unsigned long long>(n));
  return buf;
}

QueryResponse Gateway::HandleQuery(const QueryRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  if (!IsValidSessionId(request.session_id)) {
    throw Error(ErrorCode::kInvalidArgument, "session_id must match [A-Za-z0-9_-]{1,64}");
  }
  const std::string text = text::SanitizeUtf8(request.text);
  CheckQuery(text);
  const std::string collapsed = text::CollapseWhitespace(text);
  const std::string normalized = text::NormalizeQuery(collapsed);
  if (normalized.empty()) throw Error(ErrorCode::kEmptyQuery, "query is empty");

  const std::string key = CacheKey(registry_->version(), normalized);
  std::optional<ClassificationResult> hit;
  try {
    hit = cache_->Lookup(key);
  } catch (const std::exception& e) {
    spdlog::warn("cache lookup failed: {}", e.what());
  }

  ClassificationResult classification;
  if (hit) {
    classification = std::move(*hit);
  } else {
    std::shared_ptr<BackendPool> pool = this->pool();
    invocations_.fetch_add(1);
    classification = Classify(collapsed, *pool, *registry_);
    try {
      cache_->Store(key, classification);
    } catch (const std::exception& e) {
      spdlog::warn("cache store failed: {}", e.what());
    }
  }

  QueryResponse response;
  response.label = classification.label;
  response.params = classification.params;
  response.cached = classification.cached;
  response.backend_id = classification.backend_id;
  response.request_id = NextRequestId();

  const ApiFunction* fn = registry_->FindFunction(classification.label);
  if (fn == nullptr) {
    response.result = ExecutionResult::Fail(ExecStatus::kInvalidRoute, "no matching API route");
  } else {
    auto bound = BindParams(classification.label, *fn, classification.params, *clock_);
    if (auto* failure = std::get_if<BindingFailure>(&bound)) {
      response.result = ExecutionResult::Fail(failure->status, failure->message());
    } else {
      response.result = ExecuteCall(std::get<BoundArgs>(bound), stores_, *weather_, *clock_);
    }
  }
  response.latency = std::chrono::steady_clock::now() - start;

  HistoryEntry entry;
  entry.request_id = response.request_id;
  entry.session_id = request.session_id;
  entry.query = text;
  entry.label = response.label;
  entry.status = response.result.status;
  entry.message = response.result.message;
  AppendHistory(std::move(entry));
  return response;
}

void Gateway::AppendHistory(HistoryEntry entry) {
  const std::int64_t now = MicrosSinceEpoch(clock_->Now());
  std::lock_guard lock(history_mu_);
  auto& entries = history_[entry.session_id];
  entry.timestamp_us = entries.empty() ? now : std::max(now, entries.back().timestamp_us + 1);
  if (history_file_.is_open()) {
    history_file_ << entry.ToJson().dump() << '\n';
    history_file_.flush();
  }
  entries.push_back(std::move(entry));
}

void Gateway::LoadHistory() {
  if (history_path_.empty()) return;
  std::lock_guard lock(history_mu_);
  std::ifstream in(history_path_);
  std::string line;
  std::size_t loaded = 0;
  while (std::getline(in, line)) {
    if (text::Trim(line).empty()) continue;
    try {
      HistoryEntry e = HistoryEntry::FromJson(json::parse(line));
      history_[e.session_id].push_back(std::move(e));
      ++loaded;
    } catch (const std::exception& ex) {
      spdlog::warn("skipping unreadable history line: {}", ex.what());
    }
  }
  for (auto& [session, entries] : history_) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const HistoryEntry& a, const HistoryEntry& b) { return a.timestamp_us < b.timestamp_us; });
  }
  if (loaded > 0) spdlog::info("loaded {} history entries from {}", loaded, history_path_.string());
  history_file_.open(history_path_, std::ios::app);
  if (!history_file_) throw Error(ErrorCode::kIo, "cannot open history file " + history_path_.string());
}

std::vector<HistoryEntry> Gateway::GetHistory(const std::string& session_id, int limit,
                                              std::optional<std::int64_t> before) const {
  if (!IsValidSessionId(session_id)) throw Error(ErrorCode::kInvalidArgument, "invalid session_id");
  if (limit < 1 || limit > kMaxHistoryLimit) {
    throw Error(ErrorCode::kInvalidArgument, "limit must be in [1, " + std::to_string(kMaxHistoryLimit) + "]");
  }
  std::vector<HistoryEntry> out;
  std::lock_guard lock(history_mu_);
  auto it = history_.find(session_id);
  if (it == history_.end()) return out;
  const auto& entries = it->second;
  for (auto e = entries.rbegin(); e != entries.rend() && static_cast<int>(out.size()) < limit; ++e) {
    if (before && e->timestamp_us >= *before) continue;
    out.push_back(*e);
  }
  return out;
}

HealthReport Gateway::Health() const {
  HealthReport report;
  report.registry_version = registry_->version();
  report.status = "ok";
  std::shared_ptr<BackendPool> pool = this->pool();
  for (const auto& m : pool->members()) {
    bool reachable = false;
    try {
      reachable = m.classifier->Reachable();
    } catch (const std::exception&) {
      reachable = false;
    }
    if (!reachable) report.status = "degraded";
    report.backends.push_back({m.spec.id, reachable});
  }
  return report;
}

}  // namespace nlapi
