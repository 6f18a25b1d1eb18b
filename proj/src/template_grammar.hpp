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

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hierarchy.hpp"

namespace nlapi {

// Seeded generator with a portable bounded draw. std::uniform_int_distribution
// differs between standard libraries; this does not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }
  // Uniform in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n);
  template <typename T>
  const T& Pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(Below(items.size()))];
  }

 private:
  std::mt19937_64 engine_;
};

// Per-function sentence frames. A frame may contain {slot} placeholders and
// [a|b|c] inline alternatives.
class TemplateGrammar {
 public:
  static const TemplateGrammar& Default();

  bool Covers(const Label& label) const { return frames_.count(label.ToString()) > 0; }
  const std::vector<std::string>& Frames(const Label& label) const;
  std::size_t function_count() const { return frames_.size(); }

  // One decorated expansion of a random frame.
  std::string Sample(const Label& label, Rng& rng) const;

  // Up to n queries, distinct after case folding and whitespace collapse.
  // Pure function of (label, n, seed). Throws Error(kInvalidArgument) when the
  // grammar has no frames for label.
  std::vector<std::string> Generate(const Label& label, std::size_t n, std::uint64_t seed) const;

  // Seed for one label, derived from a run seed.
  static std::uint64_t LabelSeed(std::uint64_t seed, const Label& label);

 private:
  TemplateGrammar();
  std::string Expand(std::string_view frame, Rng& rng) const;
  std::string Slot(std::string_view name, Rng& rng) const;

  std::map<std::string, std::vector<std::string>> frames_;
  std::map<std::string, std::vector<std::string>> lists_;
};

}  // namespace nlapi
