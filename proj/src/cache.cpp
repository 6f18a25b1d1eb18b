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
#include "cache.hpp"

#include "text.hpp"

namespace nlapi {

std::string CacheKey(std::int64_t registry_version, std::string_view normalized_query) {
  std::string material = std::to_string(registry_version);
  material.push_back('\x1f');
  material.append(normalized_query);
  return text::Hex64(text::Fnv1a64(material));
}

TtlLruCache::TtlLruCache(std::size_t capacity, std::chrono::milliseconds ttl, std::shared_ptr<const Clock> clock)
    : capacity_(capacity == 0 ? 1 : capacity), ttl_(ttl), clock_(std::move(clock)) {
  if (!clock_) clock_ = std::make_shared<SystemClock>();
}

std::optional<ClassificationResult> TtlLruCache::Lookup(const std::string& key) {
  const TimePoint now = clock_->Now();
  std::lock_guard lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  if (!(now < it->second->expires_at)) {
    order_.erase(it->second);
    index_.erase(it);
    return std::nullopt;
  }
  order_.splice(order_.begin(), order_, it->second);
  ClassificationResult out = it->second->value;
  out.cached = true;
  return out;
}

void TtlLruCache::Store(const std::string& key, const ClassificationResult& value,
                        std::optional<std::chrono::milliseconds> ttl) {
  const TimePoint expires = clock_->Now() + ttl.value_or(ttl_);
  std::lock_guard lock(mu_);
  if (auto it = index_.find(key); it != index_.end()) {
    it->second->value = value;
    it->second->expires_at = expires;
    order_.splice(order_.begin(), order_, it->second);
    return;
  }
  while (order_.size() >= capacity_) {
    index_.erase(order_.back().key);
    order_.pop_back();
  }
  order_.push_front(Entry{key, value, expires});
  index_.emplace(key, order_.begin());
}

std::size_t TtlLruCache::size() const {
  std::lock_guard lock(mu_);
  return order_.size();
}

bool TtlLruCache::Contains(const std::string& key) const {
  std::lock_guard lock(mu_);
  return index_.count(key) > 0;
}

}  // namespace nlapi
