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
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hierarchy.hpp"

namespace nlapi {

inline constexpr std::size_t kMaxQueryLength = 4000;

using ParamMap = std::map<std::string, std::string>;

struct Decoding {
  double temperature = 0.0;
  int max_output_tokens = 256;
};

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  Decoding decoding;

  bool operator==(const PromptBundle& o) const {
    return system_text == o.system_text && user_text == o.user_text &&
           decoding.temperature == o.decoding.temperature &&
           decoding.max_output_tokens == o.decoding.max_output_tokens;
  }
};

// Throws Error(kEmptyQuery) or Error(kQueryTooLong).
void CheckQuery(std::string_view query);

// System text = fixed preamble + RegistryDigest + output-format block.
PromptBundle BuildPrompt(std::string_view query, const Registry& registry);

// Appended as a follow-up user turn when the previous reply did not parse.
inline constexpr std::string_view kCorrectiveInstruction = "Respond with only the JSON object.";

// Diagnostic flags carried on results.
inline constexpr std::string_view kLabelUnresolved = "label_unresolved";
inline constexpr std::string_view kBackendUnparseable = "backend_unparseable";

struct ClassificationCore {
  Label label;
  ParamMap params;
  std::vector<std::string> diagnostics;
};

struct ParseFailure {
  std::string reason;
  std::string raw;
};

using ParseOutcome = std::variant<ClassificationCore, ParseFailure>;

// Extracts the first JSON object from raw model text (surrounding prose and
// code fences are tolerated), resolves its label and filters params to the
// labeled function's parameters. Unresolved labels become the reserved
// invalid label flagged label_unresolved.
ParseOutcome ParseClassifierOutput(std::string_view raw, const Registry& registry);

// Serializes a core as the JSON object the output contract asks for.
std::string SerializeCore(const ClassificationCore& core);

struct ClassificationResult {
  Label label;
  ParamMap params;
  std::string backend_id;
  std::string raw_output;
  std::chrono::duration<double, std::milli> latency{0};
  bool cached = false;
  std::vector<std::string> diagnostics;

  nlohmann::json ToJson() const;
  static ClassificationResult FromJson(const nlohmann::json& j);
};

enum class BackendKind { kChatHttp, kMockRules };

struct BackendSpec {
  std::string id;
  BackendKind kind = BackendKind::kMockRules;
  std::string endpoint;         // chat_http only
  std::string model_name;       // chat_http only
  std::string credentials_ref;  // name of the env var holding the bearer token
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  std::chrono::milliseconds retry_base_delay{200};  // doubled per transport retry
  std::string ruleset_path;  // mock_rules only; empty selects the built-in ruleset

  // Validates the endpoint/model_name iff chat_http invariant.
  static BackendSpec FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

// A classifier backend. Implementations are shared between threads.
class Classifier {
 public:
  virtual ~Classifier() = default;

  // Always returns a label that resolves in registry (possibly the reserved
  // invalid label). Throws Error(kClassificationUnavailable) when the backend
  // cannot be reached.
  virtual ClassificationResult Classify(std::string_view query, const Registry& registry) = 0;

  virtual bool Reachable() { return true; }
};

enum class PoolPolicy { kRoundRobin, kLeastInflight };

std::string_view ToString(PoolPolicy policy);
PoolPolicy ParsePoolPolicy(std::string_view s);

class BackendPool {
 public:
  struct Member {
    BackendSpec spec;
    std::shared_ptr<Classifier> classifier;
  };

  // Holds one in-flight slot on the selected member until destroyed.
  class Lease {
   public:
    Lease(const Member& member, std::atomic<int>& inflight) : member_(&member), inflight_(&inflight) {}
    Lease(Lease&& o) noexcept : member_(o.member_), inflight_(std::exchange(o.inflight_, nullptr)) {}
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;
    Lease& operator=(Lease&&) = delete;
    ~Lease() {
      if (inflight_) inflight_->fetch_sub(1, std::memory_order_acq_rel);
    }

    const Member& member() const { return *member_; }

   private:
    const Member* member_;
    std::atomic<int>* inflight_;
  };

  // Throws Error(kInvalidArgument) when members is empty.
  BackendPool(std::vector<Member> members, PoolPolicy policy);

  Lease Acquire();

  // Selection without holding an in-flight slot.
  const BackendSpec& SelectBackend();

  PoolPolicy policy() const { return policy_; }
  const std::vector<Member>& members() const { return members_; }
  int inflight(std::size_t index) const { return inflight_[index].load(); }

 private:
  std::size_t NextIndex();

  std::vector<Member> members_;
  PoolPolicy policy_;
  std::unique_ptr<std::atomic<int>[]> inflight_;
  std::atomic<std::uint64_t> cursor_{0};
};

// Selects a backend, runs it and stamps backend_id and latency.
ClassificationResult Classify(std::string_view query, BackendPool& pool, const Registry& registry);

}  // namespace nlapi
