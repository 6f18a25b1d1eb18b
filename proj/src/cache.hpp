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
#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "classify.hpp"
#include "clock.hpp"

namespace nlapi {

// hex(FNV-1a 64) of the registry version and the normalized query.
std::string CacheKey(std::int64_t registry_version, std::string_view normalized_query);

class ClassificationCache {
 public:
  virtual ~ClassificationCache() = default;
  // Returned results have cached=true. Failures read as a miss.
  virtual std::optional<ClassificationResult> Lookup(const std::string& key) = 0;
  // ttl defaults to the cache's configured ttl.
  virtual void Store(const std::string& key, const ClassificationResult& value,
                     std::optional<std::chrono::milliseconds> ttl = std::nullopt) = 0;
  virtual std::size_t size() const = 0;
};

// In-process map with per-entry expiry and least-recently-used eviction.
class TtlLruCache final : public ClassificationCache {
 public:
  static constexpr std::size_t kDefaultCapacity = 10000;
  static constexpr std::chrono::seconds kDefaultTtl{300};

  TtlLruCache(std::size_t capacity, std::chrono::milliseconds ttl, std::shared_ptr<const Clock> clock);

  std::optional<ClassificationResult> Lookup(const std::string& key) override;
  void Store(const std::string& key, const ClassificationResult& value,
             std::optional<std::chrono::milliseconds> ttl = std::nullopt) override;
  std::size_t size() const override;

  bool Contains(const std::string& key) const;  // ignores expiry, no recency bump

 private:
  struct Entry {
    std::string key;
    ClassificationResult value;
    TimePoint expires_at;
  };

  std::size_t capacity_;
  std::chrono::milliseconds ttl_;
  std::shared_ptr<const Clock> clock_;
  mutable std::mutex mu_;
  std::list<Entry> order_;  // front = most recently used
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
};

// Adapter for an external key-value server speaking RESP over TCP.
// url: redis://host:port
class RedisCache final : public ClassificationCache {
 public:
  RedisCache(std::string url, std::chrono::milliseconds ttl,
             std::chrono::milliseconds io_timeout = std::chrono::milliseconds(500));

  std::optional<ClassificationResult> Lookup(const std::string& key) override;
  void Store(const std::string& key, const ClassificationResult& value,
             std::optional<std::chrono::milliseconds> ttl = std::nullopt) override;
  std::size_t size() const override { return 0; }

 private:
  std::optional<std::string> Command(const std::vector<std::string>& args);

  std::string host_;
  int port_ = 6379;
  std::chrono::milliseconds ttl_;
  std::chrono::milliseconds io_timeout_;
};

}  // namespace nlapi
