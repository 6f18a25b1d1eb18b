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

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "classify.hpp"
#include "clock.hpp"
#include "hierarchy.hpp"
#include "values.hpp"
#include "weather.hpp"

namespace nlapi {

enum class ExecStatus { kOk, kInvalidRoute, kMissingParam, kBadParam, kExecError };

std::string_view ToString(ExecStatus status);

struct ExecutionResult {
  ExecStatus status = ExecStatus::kOk;
  std::optional<nlohmann::json> payload;  // present iff status == kOk
  std::string message;                    // non-empty unless ok

  static ExecutionResult Ok(nlohmann::json payload, std::string message);
  static ExecutionResult Fail(ExecStatus status, std::string message);

  nlohmann::json ToJson() const;
};

struct BoundArgs {
  Label label;
  std::map<std::string, Value> values;

  bool Has(std::string_view name) const { return values.find(std::string(name)) != values.end(); }
  const Value& Get(std::string_view name) const { return values.at(std::string(name)); }
  double Number(std::string_view name) const;  // double or integer value
  const std::string& Text(std::string_view name) const;
};

struct BindingFailure {
  ExecStatus status;  // kMissingParam or kBadParam
  std::string param;
  std::string reason;

  std::string message() const;
};

// Parses extracted keyword strings against the function's parameter specs.
// "today" for date parameters resolves against clock.
std::variant<BoundArgs, BindingFailure> BindParams(const Label& label, const ApiFunction& function,
                                                   const ParamMap& extracted, const Clock& clock);

struct CalcError {
  std::string message;
};

// IEEE double arithmetic for the calculator module.
std::variant<double, CalcError> EvalCalculator(std::string_view function, const BoundArgs& args);

// In-memory entity table. Ids are decimal strings from a counter that never
// repeats; every operation holds the store's mutex for its whole duration.
template <typename Record>
class EntityStore {
 public:
  std::string Create(Record record) {
    std::lock_guard lock(mu_);
    const std::uint64_t id = next_id_++;
    entities_.emplace(id, std::move(record));
    return std::to_string(id);
  }

  std::optional<Record> Get(std::string_view id) const {
    std::lock_guard lock(mu_);
    auto key = ParseId(id);
    if (!key) return std::nullopt;
    auto it = entities_.find(*key);
    if (it == entities_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::pair<std::string, Record>> List() const {
    std::lock_guard lock(mu_);
    std::vector<std::pair<std::string, Record>> out;
    out.reserve(entities_.size());
    for (const auto& [id, rec] : entities_) out.emplace_back(std::to_string(id), rec);
    return out;
  }

  // Applies fn to the record under the lock. fn returns an error message to
  // reject the change. Returns "not found" for an unknown id.
  template <typename Fn>
  std::optional<std::string> Update(std::string_view id, Fn&& fn) {
    std::lock_guard lock(mu_);
    auto key = ParseId(id);
    auto it = key ? entities_.find(*key) : entities_.end();
    if (it == entities_.end()) return std::string("not found");
    Record copy = it->second;
    if (std::optional<std::string> err = fn(copy)) return err;
    it->second = std::move(copy);
    return std::nullopt;
  }

  bool Erase(std::string_view id) {
    std::lock_guard lock(mu_);
    auto key = ParseId(id);
    return key && entities_.erase(*key) > 0;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entities_.size();
  }

 private:
  static std::optional<std::uint64_t> ParseId(std::string_view id) {
    if (id.empty() || id.size() > 19) return std::nullopt;
    std::uint64_t v = 0;
    for (char c : id) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
  }

  mutable std::mutex mu_;
  std::map<std::uint64_t, Record> entities_;
  std::uint64_t next_id_ = 1;
};

struct Note {
  std::string title;
  std::string content;
  std::string created_at;
  bool operator==(const Note&) const = default;
};

struct Notification {
  std::string recipient;
  std::string message;
  bool read = false;  // only ever goes false -> true
  std::string created_at;
  bool operator==(const Notification&) const = default;
};

enum class EmailState { kDraft, kSent, kDeleted };

struct Email {
  std::string to;
  std::string subject;
  std::string body;
  EmailState state = EmailState::kDraft;
  std::string in_reply_to;
  bool operator==(const Email&) const = default;
};

struct Event {
  std::string title;
  Date date;
  std::optional<TimeOfDay> time;
  bool operator==(const Event&) const = default;
};

struct EntityStores {
  EntityStore<Note> notes;
  EntityStore<Notification> notifications;
  EntityStore<Email> emails;
  EntityStore<Event> events;
};

// Dispatches a bound call. Holds at most one store lock at a time.
ExecutionResult ExecuteCall(const BoundArgs& bound, EntityStores& stores, const WeatherProvider& weather,
                            const Clock& clock);

}  // namespace nlapi
