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
// Independent reference implementations used to check the library.
#pragma once

#include <cmath>
#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nlapi::oracle {

struct LabelPair {
  std::string true_module, true_function, pred_module, pred_function;
};

// Fraction of records whose module matches, nullopt for an empty set.
inline std::optional<double> ModuleAccuracy(const std::vector<LabelPair>& rows) {
  if (rows.empty()) return std::nullopt;
  long long hit = 0;
  for (const auto& r : rows) {
    if (r.true_module == r.pred_module) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(rows.size());
}

// Among module hits, fraction whose function also matches.
inline std::optional<double> FunctionAccuracy(const std::vector<LabelPair>& rows) {
  long long module_hits = 0;
  long long both = 0;
  for (const auto& r : rows) {
    if (r.true_module != r.pred_module) continue;
    ++module_hits;
    if (r.true_function == r.pred_function) ++both;
  }
  if (module_hits == 0) return std::nullopt;
  return static_cast<double>(both) / static_cast<double>(module_hits);
}

inline double Factorial(int n) {
  double acc = 1;
  for (int i = 2; i <= n; ++i) acc *= i;
  return acc;
}

// Direct arithmetic for the calculator functions.
inline double Calc(const std::string& fn, double a, double b) {
  if (fn == "add") return a + b;
  if (fn == "subtract") return a - b;
  if (fn == "multiply") return a * b;
  if (fn == "divide") return a / b;
  if (fn == "power") return std::pow(a, b);
  if (fn == "log") return std::log(a) / std::log(b);
  if (fn == "ln") return std::log(a);
  if (fn == "factorial") return Factorial(static_cast<int>(a));
  if (fn == "sin") return std::sin(a);
  if (fn == "cos") return std::cos(a);
  if (fn == "tan") return std::tan(a);
  return NAN;
}

// LRU with TTL, kept as a plain recency list.
class LruModel {
 public:
  explicit LruModel(std::size_t capacity) : capacity_(capacity) {}

  bool Get(const std::string& k, std::int64_t now) {
    for (auto it = items_.begin(); it != items_.end(); ++it) {
      if (it->first != k) continue;
      if (now >= it->second) {
        items_.erase(it);
        return false;
      }
      items_.splice(items_.begin(), items_, it);
      return true;
    }
    return false;
  }

  void Put(const std::string& k, std::int64_t expires) {
    for (auto it = items_.begin(); it != items_.end(); ++it) {
      if (it->first == k) {
        items_.erase(it);
        break;
      }
    }
    items_.emplace_front(k, expires);
    if (items_.size() > capacity_) items_.pop_back();
  }

  bool Holds(const std::string& k) const {
    for (const auto& [key, _] : items_) {
      if (key == k) return true;
    }
    return false;
  }
  std::size_t size() const { return items_.size(); }

 private:
  std::size_t capacity_;
  std::list<std::pair<std::string, std::int64_t>> items_;
};

}  // namespace nlapi::oracle
