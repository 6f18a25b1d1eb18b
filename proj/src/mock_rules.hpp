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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/regex.hpp>
#include <json.hpp>

#include "classify.hpp"

namespace nlapi {

// One ordered rule: a case-insensitive regex, its target label, and the
// capture groups (by index or by name) that feed each parameter.
struct MockRule {
  std::string pattern;
  Label target;
  std::map<std::string, std::variant<int, std::string>> param_groups;
};

class MockRuleset {
 public:
  struct Match {
    Label label;
    ParamMap params;
    std::size_t rule_index = 0;
  };

  // Compiles every pattern. Throws Error(kInvalidArgument) naming the rule on
  // an invalid regex or a malformed entry.
  explicit MockRuleset(std::vector<MockRule> rules);

  static MockRuleset FromJson(const nlohmann::json& document);
  static MockRuleset FromFile(const std::filesystem::path& path);

  // Built-in ruleset covering every function of the default registry.
  static std::shared_ptr<const MockRuleset> Default();

  nlohmann::json ToJson() const;

  // First matching rule wins.
  std::optional<Match> FirstMatch(std::string_view query) const;

  const std::vector<MockRule>& rules() const { return rules_; }

 private:
  std::vector<MockRule> rules_;
  std::vector<boost::regex> compiled_;
};

// Deterministic classification against a ruleset. The matched label is
// re-validated against registry; no match yields the reserved invalid label.
ClassificationResult MockClassify(std::string_view query, const MockRuleset& ruleset, const Registry& registry);

class MockClassifier final : public Classifier {
 public:
  explicit MockClassifier(std::shared_ptr<const MockRuleset> ruleset) : ruleset_(std::move(ruleset)) {}

  ClassificationResult Classify(std::string_view query, const Registry& registry) override;

 private:
  std::shared_ptr<const MockRuleset> ruleset_;
};

}  // namespace nlapi
