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
#include "classify.hpp"

#include <spdlog/spdlog.h>

#include "error.hpp"
#include "text.hpp"

namespace nlapi {

using nlohmann::json;

namespace {

constexpr std::string_view kPreamble =
    "You route user requests to API functions. The available functions are listed below,\n"
    "one per line, as module.function(parameter:kind, ...) followed by a short description.\n"
    "A '?' after a parameter kind marks it optional.\n\n"
    "API hierarchy:\n";

constexpr std::string_view kOutputFormat =
    "\nOutput format:\n"
    "Respond with a single JSON object and nothing else, of the form\n"
    "{\"module\": \"<module>\", \"function\": \"<function>\", \"params\": {\"<parameter>\": \"<value>\"}}\n"
    "Use only module and function names from the list above.\n"
    "Copy parameter values from the request as strings; omit parameters the request does not give.\n"
    "If no route applies, answer module routes_not_exist, function return_invalid_error.\n";

// Returns the end (one past the closing brace) of the balanced object that
// starts at s[begin], honoring JSON string escapes; npos if unbalanced.
std::size_t MatchObject(std::string_view s, std::size_t begin) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = begin; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<json> FirstJsonObject(std::string_view raw) {
  for (std::size_t pos = raw.find('{'); pos != std::string_view::npos; pos = raw.find('{', pos + 1)) {
    const std::size_t end = MatchObject(raw, pos);
    if (end == std::string_view::npos) continue;
    json parsed = json::parse(raw.substr(pos, end - pos), nullptr, /*allow_exceptions=*/false);
    if (parsed.is_object()) return parsed;
  }
  return std::nullopt;
}

std::string ParamValueToString(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

void CheckQuery(std::string_view query) {
  if (text::Trim(query).empty()) throw Error(ErrorCode::kEmptyQuery, "query is empty");
  if (text::CodePointLength(query) > kMaxQueryLength) {
    throw Error(ErrorCode::kQueryTooLong,
                "query exceeds " + std::to_string(kMaxQueryLength) + " characters");
  }
}

PromptBundle BuildPrompt(std::string_view query, const Registry& registry) {
  CheckQuery(query);
  PromptBundle bundle;
  bundle.system_text.reserve(4096);
  bundle.system_text += kPreamble;
  bundle.system_text += RegistryDigest(registry);
  bundle.system_text += kOutputFormat;
  bundle.user_text = std::string(query);
  return bundle;
}

ParseOutcome ParseClassifierOutput(std::string_view raw, const Registry& registry) {
  std::optional<json> obj = FirstJsonObject(raw);
  if (!obj) return ParseFailure{"no JSON object found", std::string(raw)};

  auto mod = obj->find("module");
  auto fn = obj->find("function");
  if (mod == obj->end() || fn == obj->end() || !mod->is_string() || !fn->is_string()) {
    return ParseFailure{"JSON object lacks string \"module\" and \"function\" keys", std::string(raw)};
  }

  ClassificationCore core;
  std::optional<Label> resolved = ValidateLabel({mod->get<std::string>(), fn->get<std::string>()}, registry);
  if (!resolved) {
    core.label = InvalidLabel();
    core.diagnostics.emplace_back(kLabelUnresolved);
    return core;
  }
  core.label = *resolved;

  const ApiFunction* function = registry.FindFunction(core.label);
  auto params = obj->find("params");
  if (params != obj->end() && params->is_object()) {
    for (const auto& [key, value] : params->items()) {
      if (value.is_null()) continue;
      const std::string name = text::NormalizeIdentifier(key);
      if (function->FindParam(name) == nullptr) {
        spdlog::debug("dropping unknown parameter '{}' for {}", name, core.label.ToString());
        continue;
      }
      core.params[name] = ParamValueToString(value);
    }
  }
  return core;
}

std::string SerializeCore(const ClassificationCore& core) {
  json j = {{"module", core.label.module}, {"function", core.label.function}, {"params", core.params}};
  return j.dump();
}

json ClassificationResult::ToJson() const {
  return {{"module", label.module},
          {"function", label.function},
          {"params", params},
          {"backend_id", backend_id},
          {"raw_output", raw_output},
          {"latency_ms", latency.count()},
          {"cached", cached},
          {"diagnostics", diagnostics}};
}

ClassificationResult ClassificationResult::FromJson(const json& j) {
  ClassificationResult r;
  r.label = {j.at("module").get<std::string>(), j.at("function").get<std::string>()};
  r.params = j.value("params", ParamMap{});
  r.backend_id = j.value("backend_id", std::string());
  r.raw_output = j.value("raw_output", std::string());
  r.latency = std::chrono::duration<double, std::milli>(j.value("latency_ms", 0.0));
  r.cached = j.value("cached", false);
  r.diagnostics = j.value("diagnostics", std::vector<std::string>{});
  return r;
}

BackendSpec BackendSpec::FromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "backend spec must be an object");
  BackendSpec spec;
  try {
    spec.id = j.at("id").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "chat_http") {
      spec.kind = BackendKind::kChatHttp;
    } else if (kind == "mock_rules") {
      spec.kind = BackendKind::kMockRules;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "backend " + spec.id + ": unknown kind '" + kind + "'");
    }
    spec.endpoint = j.value("endpoint", std::string());
    spec.model_name = j.value("model_name", std::string());
    spec.credentials_ref = j.value("credentials_ref", std::string());
    spec.timeout = std::chrono::milliseconds(j.value("timeout_ms", 30000));
    spec.max_retries = j.value("max_retries", 2);
    spec.retry_base_delay = std::chrono::milliseconds(j.value("retry_base_delay_ms", 200));
    spec.ruleset_path = j.value("ruleset_path", std::string());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("invalid backend spec: ") + e.what());
  }
  if (spec.id.empty() || spec.id.size() > 64 ||
      spec.id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-") !=
          std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "invalid backend id '" + spec.id + "'");
  }
  const bool http = spec.kind == BackendKind::kChatHttp;
  if (http && (spec.endpoint.empty() || spec.model_name.empty())) {
    throw Error(ErrorCode::kInvalidArgument,
                "backend " + spec.id + ": chat_http requires endpoint and model_name");
  }
  if (!http && (!spec.endpoint.empty() || !spec.model_name.empty())) {
    throw Error(ErrorCode::kInvalidArgument,
                "backend " + spec.id + ": endpoint/model_name are only valid for chat_http");
  }
  if (spec.max_retries < 0 || spec.max_retries > 10) {
    throw Error(ErrorCode::kInvalidArgument, "backend " + spec.id + ": max_retries must be in [0, 10]");
  }
  if (spec.retry_base_delay.count() < 0) {
    throw Error(ErrorCode::kInvalidArgument, "backend " + spec.id + ": retry_base_delay_ms must be >= 0");
  }
  if (spec.timeout.count() <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "backend " + spec.id + ": timeout_ms must be positive");
  }
  return spec;
}

json BackendSpec::ToJson() const {
  json j = {{"id", id},
            {"kind", kind == BackendKind::kChatHttp ? "chat_http" : "mock_rules"},
            {"timeout_ms", timeout.count()},
            {"max_retries", max_retries},
            {"retry_base_delay_ms", retry_base_delay.count()}};
  if (kind == BackendKind::kChatHttp) {
    j["endpoint"] = endpoint;
    j["model_name"] = model_name;
  }
  if (!credentials_ref.empty()) j["credentials_ref"] = credentials_ref;
  if (!ruleset_path.empty()) j["ruleset_path"] = ruleset_path;
  return j;
}

std::string_view ToString(PoolPolicy policy) {
  return policy == PoolPolicy::kRoundRobin ? "round_robin" : "least_inflight";
}

PoolPolicy ParsePoolPolicy(std::string_view s) {
  if (s == "round_robin") return PoolPolicy::kRoundRobin;
  if (s == "least_inflight") return PoolPolicy::kLeastInflight;
  throw Error(ErrorCode::kInvalidArgument, "unknown pool policy '" + std::string(s) + "'");
}

BackendPool::BackendPool(std::vector<Member> members, PoolPolicy policy)
    : members_(std::move(members)), policy_(policy) {
  if (members_.empty()) throw Error(ErrorCode::kInvalidArgument, "backend pool is empty");
  inflight_ = std::make_unique<std::atomic<int>[]>(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) inflight_[i].store(0);
}

std::size_t BackendPool::NextIndex() {
  if (policy_ == PoolPolicy::kRoundRobin) {
    return cursor_.fetch_add(1, std::memory_order_relaxed) % members_.size();
  }
  std::size_t best = 0;
  int best_load = inflight_[0].load(std::memory_order_acquire);
  for (std::size_t i = 1; i < members_.size(); ++i) {
    const int load = inflight_[i].load(std::memory_order_acquire);
    if (load < best_load) {
      best = i;
      best_load = load;
    }
  }
  return best;
}

BackendPool::Lease BackendPool::Acquire() {
  const std::size_t i = NextIndex();
  inflight_[i].fetch_add(1, std::memory_order_acq_rel);
  return Lease(members_[i], inflight_[i]);
}

const BackendSpec& BackendPool::SelectBackend() { return members_[NextIndex()].spec; }

ClassificationResult Classify(std::string_view query, BackendPool& pool, const Registry& registry) {
  BackendPool::Lease lease = pool.Acquire();
  const auto start = std::chrono::steady_clock::now();
  ClassificationResult result = lease.member().classifier->Classify(query, registry);
  result.latency = std::chrono::steady_clock::now() - start;
  result.backend_id = lease.member().spec.id;
  result.cached = false;
  return result;
}

}  // namespace nlapi
