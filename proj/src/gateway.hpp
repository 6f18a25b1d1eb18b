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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "backends.hpp"
#include "cache.hpp"
#include "classify.hpp"
#include "clock.hpp"
#include "execute.hpp"
#include "hierarchy.hpp"
#include "weather.hpp"

namespace nlapi {

struct GatewayConfig {
  std::string listen = "127.0.0.1:8080";
  std::string registry_path;  // empty selects the built-in registry
  std::chrono::seconds cache_ttl{300};
  std::size_t cache_capacity = TtlLruCache::kDefaultCapacity;
  std::string cache_external_url;
  PoolPolicy policy = PoolPolicy::kRoundRobin;
  std::vector<BackendSpec> backends;  // defaults to one mock_rules backend "mock"
  std::string history_path;
  std::string weather_fixture_path;

  // Relative paths resolve against base_dir.
  static GatewayConfig FromJson(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static GatewayConfig FromFile(const std::filesystem::path& path);
  nlohmann::json ToJson() const;

  // host and port of listen.
  std::pair<std::string, int> ListenAddress() const;
};

struct QueryRequest {
  std::string text;
  std::string session_id;

  static QueryRequest FromJson(const nlohmann::json& j);
};

struct QueryResponse {
  Label label;
  ParamMap params;
  ExecutionResult result;
  bool cached = false;
  std::string backend_id;
  std::chrono::duration<double, std::milli> latency{0};
  std::string request_id;

  nlohmann::json ToJson() const;
};

struct HistoryEntry {
  std::string request_id;
  std::string session_id;
  std::int64_t timestamp_us = 0;  // microseconds since the Unix epoch
  std::string query;
  Label label;
  ExecStatus status = ExecStatus::kOk;
  std::string message;

  nlohmann::json ToJson() const;
  static HistoryEntry FromJson(const nlohmann::json& j);
};

struct BackendHealth {
  std::string id;
  bool reachable = false;
};

struct HealthReport {
  std::string status;  // "ok" or "degraded"
  std::int64_t registry_version = 0;
  std::vector<BackendHealth> backends;

  nlohmann::json ToJson() const;
};

bool IsValidSessionId(std::string_view id);

using ClassifierFactory = std::function<std::shared_ptr<Classifier>(const BackendSpec&)>;

// Collaborators; null members get production defaults.
struct GatewayDeps {
  std::shared_ptr<const Registry> registry;
  std::shared_ptr<const Clock> clock;
  std::shared_ptr<ClassificationCache> cache;
  std::shared_ptr<const WeatherProvider> weather;
  ClassifierFactory classifier_factory;
  std::string history_path;
};

class Gateway {
 public:
  static constexpr int kMaxHistoryLimit = 500;

  // Throws Error on an invalid pool.
  Gateway(GatewayDeps deps, const std::vector<BackendSpec>& specs, PoolPolicy policy);

  // Builds registry, cache, weather provider and pool from config. Non-null
  // members of overrides win.
  static std::unique_ptr<Gateway> FromConfig(const GatewayConfig& config, GatewayDeps overrides = {});

  // Throws Error: kInvalidArgument/kEmptyQuery/kQueryTooLong for a bad request,
  // kClassificationUnavailable when no backend answered.
  QueryResponse HandleQuery(const QueryRequest& request);

  // Newest first. Throws Error(kInvalidArgument) on bad paging params.
  std::vector<HistoryEntry> GetHistory(const std::string& session_id, int limit,
                                       std::optional<std::int64_t> before = std::nullopt) const;

  // Throws Error(kInvalidArgument) for an empty list, Error(kConflict) for a
  // duplicate id.
  void SetPool(const std::vector<BackendSpec>& specs, PoolPolicy policy);

  HealthReport Health() const;

  std::uint64_t classifier_invocations() const { return invocations_.load(); }
  std::shared_ptr<const Registry> registry() const { return registry_; }
  std::shared_ptr<BackendPool> pool() const;
  EntityStores& stores() { return stores_; }

 private:
  std::string NextRequestId();
  void AppendHistory(HistoryEntry entry);
  void LoadHistory();

  std::shared_ptr<const Registry> registry_;
  std::shared_ptr<const Clock> clock_;
  std::shared_ptr<ClassificationCache> cache_;
  std::shared_ptr<const WeatherProvider> weather_;
  ClassifierFactory factory_;

  mutable std::mutex pool_mu_;
  std::shared_ptr<BackendPool> pool_;

  EntityStores stores_;

  mutable std::mutex history_mu_;
  std::map<std::string, std::vector<HistoryEntry>> history_;  // per session, ascending timestamp
  std::filesystem::path history_path_;
  std::ofstream history_file_;

  std::atomic<std::uint64_t> invocations_{0};
  std::atomic<std::uint64_t> request_counter_{0};
  std::uint32_t request_nonce_;
};

}  // namespace nlapi
