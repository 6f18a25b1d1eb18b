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
#include "backends.hpp"

#include <cstdlib>
#include <set>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "error.hpp"
#include "mock_rules.hpp"

namespace nlapi {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string base;
  std::string path;
};

SplitUrl Split(const std::string& url) {
  const std::size_t scheme = url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const std::size_t slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

bool Retryable(int status) { return status == 0 || status == 429 || status >= 500; }

}  // namespace

json ChatRequest::ToWire() const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return {{"model", model}, {"messages", std::move(msgs)}, {"temperature", temperature}, {"max_tokens", max_tokens}};
}

HttpChatTransport::HttpChatTransport(std::string endpoint, std::string credentials_ref,
                                     std::chrono::milliseconds timeout)
    : credentials_ref_(std::move(credentials_ref)), timeout_(timeout) {
  SplitUrl split = Split(endpoint);
  base_ = std::move(split.base);
  path_ = std::move(split.path);
}

ChatReply HttpChatTransport::Post(const ChatRequest& request) {
  httplib::Client client(base_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  client.set_tcp_nodelay(true);
  httplib::Headers headers;
  if (!credentials_ref_.empty()) {
    if (const char* secret = std::getenv(credentials_ref_.c_str()); secret != nullptr) {
      headers.emplace("Authorization", std::string("Bearer ") + secret);
    } else {
      spdlog::warn("credential variable {} is not set", credentials_ref_);
    }
  }
  auto res = client.Post(path_, headers, request.ToWire().dump(), "application/json");
  if (!res) return {0, {}, httplib::to_string(res.error())};
  return {res->status, res->body, {}};
}

bool HttpChatTransport::Probe() {
  httplib::Client client(base_);
  client.set_connection_timeout(std::chrono::seconds(2));
  client.set_read_timeout(std::chrono::seconds(2));
  return static_cast<bool>(client.Get("/"));
}

TransportFactory DefaultTransportFactory() {
  return [](const BackendSpec& spec) -> std::shared_ptr<ChatTransport> {
    return std::make_shared<HttpChatTransport>(spec.endpoint, spec.credentials_ref, spec.timeout);
  };
}

std::optional<std::string> ExtractReplyContent(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const json& first = (*choices)[0];
  if (!first.is_object()) return std::nullopt;
  auto message = first.find("message");
  if (message == first.end() || !message->is_object()) return std::nullopt;
  auto content = message->find("content");
  if (content == message->end() || !content->is_string()) return std::nullopt;
  return content->get<std::string>();
}

std::string CompleteWithRetry(ChatTransport& transport, const ChatRequest& request, const BackendSpec& spec) {
  std::string last_error;
  auto delay = spec.retry_base_delay;
  for (int attempt = 0; attempt <= spec.max_retries; ++attempt) {
    if (attempt > 0 && delay.count() > 0) {
      std::this_thread::sleep_for(delay);
      delay = std::min(delay * 2, std::chrono::milliseconds(10000));
    }
    ChatReply reply = transport.Post(request);
    if (reply.status >= 200 && reply.status < 300) {
      if (auto content = ExtractReplyContent(reply.body)) return *content;
      last_error = "malformed chat-completions response";
      continue;
    }
    last_error = reply.status == 0 ? reply.error : "HTTP " + std::to_string(reply.status);
    spdlog::debug("backend {} attempt {} failed: {}", spec.id, attempt + 1, last_error);
    if (!Retryable(reply.status)) break;
  }
  throw Error(ErrorCode::kBackendUnavailable, "backend " + spec.id + " unavailable: " + last_error);
}

ChatClassifier::ChatClassifier(BackendSpec spec, std::shared_ptr<ChatTransport> transport)
    : spec_(std::move(spec)), transport_(std::move(transport)) {}

ClassificationResult ChatClassifier::Classify(std::string_view query, const Registry& registry) {
  const PromptBundle bundle = BuildPrompt(query, registry);
  ChatRequest request;
  request.model = spec_.model_name;
  request.temperature = bundle.decoding.temperature;
  request.max_tokens = bundle.decoding.max_output_tokens;
  request.messages = {{"system", bundle.system_text}, {"user", bundle.user_text}};

  ClassificationResult result;
  for (int attempt = 0; attempt <= spec_.max_retries; ++attempt) {
    std::string content;
    try {
      content = CompleteWithRetry(*transport_, request, spec_);
    } catch (const Error& e) {
      throw Error(ErrorCode::kClassificationUnavailable, e.what());
    }
    ParseOutcome outcome = ParseClassifierOutput(content, registry);
    result.raw_output = content;
    if (auto* core = std::get_if<ClassificationCore>(&outcome)) {
      result.label = std::move(core->label);
      result.params = std::move(core->params);
      result.diagnostics = std::move(core->diagnostics);
      return result;
    }
    request.messages.push_back({"assistant", content});
    request.messages.push_back({"user", std::string(kCorrectiveInstruction)});
  }
  result.label = InvalidLabel();
  result.diagnostics.emplace_back(kBackendUnparseable);
  return result;
}

std::shared_ptr<Classifier> MakeClassifier(const BackendSpec& spec, const TransportFactory& transports) {
  if (spec.kind == BackendKind::kChatHttp) {
    return std::make_shared<ChatClassifier>(spec, transports(spec));
  }
  if (spec.ruleset_path.empty()) return std::make_shared<MockClassifier>(MockRuleset::Default());
  return std::make_shared<MockClassifier>(
      std::make_shared<const MockRuleset>(MockRuleset::FromFile(spec.ruleset_path)));
}

std::shared_ptr<BackendPool> MakePool(const std::vector<BackendSpec>& specs, PoolPolicy policy,
                                      const TransportFactory& transports) {
  if (specs.empty()) throw Error(ErrorCode::kInvalidArgument, "backend pool is empty");
  std::set<std::string> ids;
  std::vector<BackendPool::Member> members;
  for (const auto& spec : specs) {
    if (!ids.insert(spec.id).second) throw Error(ErrorCode::kConflict, "duplicate backend id " + spec.id);
    members.push_back({spec, MakeClassifier(spec, transports)});
  }
  return std::make_shared<BackendPool>(std::move(members), policy);
}

}  // namespace nlapi
