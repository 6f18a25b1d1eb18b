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

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "classify.hpp"

namespace nlapi {

struct ChatMessage {
  std::string role;
  std::string content;
};

// Request in the common chat-completions wire schema.
struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 256;

  nlohmann::json ToWire() const;
};

struct ChatReply {
  int status = 0;  // 0 means the request never got an HTTP response
  std::string body;
  std::string error;
};

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatReply Post(const ChatRequest& request) = 0;
  virtual bool Probe() = 0;
};

class HttpChatTransport final : public ChatTransport {
 public:
  HttpChatTransport(std::string endpoint, std::string credentials_ref, std::chrono::milliseconds timeout);

  ChatReply Post(const ChatRequest& request) override;
  bool Probe() override;

 private:
  std::string base_;  // scheme://host[:port]
  std::string path_;
  std::string credentials_ref_;
  std::chrono::milliseconds timeout_;
};

using TransportFactory = std::function<std::shared_ptr<ChatTransport>(const BackendSpec&)>;

TransportFactory DefaultTransportFactory();

// choices[0].message.content of a chat-completions response body.
std::optional<std::string> ExtractReplyContent(std::string_view body);

// Posts the request, retrying network errors, 429 and 5xx replies up to
// spec.max_retries times with exponential backoff. Returns the reply content.
// Throws Error(kBackendUnavailable) once retries are exhausted.
std::string CompleteWithRetry(ChatTransport& transport, const ChatRequest& request, const BackendSpec& spec);

class ChatClassifier final : public Classifier {
 public:
  ChatClassifier(BackendSpec spec, std::shared_ptr<ChatTransport> transport);

  ClassificationResult Classify(std::string_view query, const Registry& registry) override;
  bool Reachable() override { return transport_->Probe(); }

 private:
  BackendSpec spec_;
  std::shared_ptr<ChatTransport> transport_;
};

std::shared_ptr<Classifier> MakeClassifier(const BackendSpec& spec, const TransportFactory& transports);

// Builds a pool from specs. Throws Error(kInvalidArgument) on an empty list and
// Error(kConflict) on duplicate ids.
std::shared_ptr<BackendPool> MakePool(const std::vector<BackendSpec>& specs, PoolPolicy policy,
                                      const TransportFactory& transports);

}  // namespace nlapi
