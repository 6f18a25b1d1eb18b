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
#include "mock_rules.hpp"

#include <gtest/gtest.h>

#include <random>

#include "error.hpp"
#include "support/test_util.hpp"

namespace nlapi {
namespace {

using nlohmann::json;

class MockRulesTest : public ::testing::Test {
 protected:
  ClassificationResult Run(std::string_view q) { return MockClassify(q, *MockRuleset::Default(), registry_); }
  const Registry registry_ = Registry::Default();
};

TEST_F(MockRulesTest, AddExtractsOperands) {
  auto r = Run("add 5 and 3");
  EXPECT_EQ(r.label, (Label{"calculator", "add"}));
  EXPECT_EQ(r.params, (ParamMap{{"a", "5"}, {"b", "3"}}));
}

TEST_F(MockRulesTest, WeatherExtractsLocation) {
  auto r = Run("what's the weather today in Boston");
  EXPECT_EQ(r.label, (Label{"weather", "get_today_weather"}));
  EXPECT_EQ(r.params.at("location"), "Boston");
}

TEST_F(MockRulesTest, DeleteNoteExtractsId) {
  auto r = Run("delete my note 42");
  EXPECT_EQ(r.label, (Label{"notes", "delete_note"}));
  EXPECT_EQ(r.params.at("id"), "42");
}

TEST_F(MockRulesTest, UnmatchedQueriesAreInvalid) {
  for (const char* q : {"play some jazz", "asdfgh", "tell me a joke", "what is the meaning of life"}) {
    EXPECT_TRUE(IsInvalidLabel(Run(q).label)) << q;
  }
}

TEST_F(MockRulesTest, IsDeterministic) {
  std::mt19937_64 rng(2);
  const std::vector<std::string> words = {"add", "note", "weather", "in", "Paris", "5", "and", "3", "email",
                                          "delete", "event", "today", "notification", "sin", "of"};
  for (int i = 0; i < 500; ++i) {
    std::string q;
    for (int k = 0; k < 6; ++k) q += words[rng() % words.size()] + " ";
    auto a = Run(q);
    auto b = Run(q);
    EXPECT_EQ(a.label, b.label);
    EXPECT_EQ(a.params, b.params);
    EXPECT_NE(registry_.FindFunction(a.label), nullptr);
  }
}

TEST_F(MockRulesTest, DefaultRulesetCoversEveryFunction) {
  std::set<std::string> targets;
  for (const auto& rule : MockRuleset::Default()->rules()) targets.insert(rule.target.ToString());
  for (const auto& m : registry_.modules()) {
    for (const auto& f : m.functions) {
      if (IsInvalidLabel({m.name, f.name})) continue;
      EXPECT_TRUE(targets.count(m.name + "." + f.name)) << m.name << "." << f.name;
    }
  }
}

TEST_F(MockRulesTest, FirstMatchWins) {
  MockRuleset rules(std::vector<MockRule>{
      {R"(\bhello\b)", {"notes", "get_all_notes"}, {}},
      {R"(\bhello (?<who>\w+))", {"notification", "send_notification"}, {{"message", "who"}}},
  });
  auto m = rules.FirstMatch("hello world");
  ASSERT_TRUE(m);
  EXPECT_EQ(m->rule_index, 0u);
  EXPECT_EQ(MockClassify("hello world", rules, registry_).label, (Label{"notes", "get_all_notes"}));
}

TEST_F(MockRulesTest, NumberedAndNamedGroups) {
  MockRuleset rules(std::vector<MockRule>{
      {R"(sum (\d+) (?<b>\d+))", {"calculator", "add"}, {{"a", 1}, {"b", "b"}}},
  });
  auto r = MockClassify("sum 4 9", rules, registry_);
  EXPECT_EQ(r.params, (ParamMap{{"a", "4"}, {"b", "9"}}));
}

TEST_F(MockRulesTest, RuleTargetingUnknownLabelYieldsInvalid) {
  MockRuleset rules(std::vector<MockRule>{{"jazz", {"music", "play"}, {}}});
  auto r = MockClassify("play jazz", rules, registry_);
  EXPECT_TRUE(IsInvalidLabel(r.label));
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0], kLabelUnresolved);
}

TEST_F(MockRulesTest, InvalidRegexIsRejected) {
  EXPECT_THROW(MockRuleset(std::vector<MockRule>{{"(unclosed", {"calculator", "add"}, {}}}), Error);
}

TEST_F(MockRulesTest, JsonRoundTripAndFile) {
  const json doc = MockRuleset::Default()->ToJson();
  const MockRuleset back = MockRuleset::FromJson(doc);
  EXPECT_EQ(back.rules().size(), MockRuleset::Default()->rules().size());
  EXPECT_EQ(back.ToJson(), doc);

  testing::TempDir dir;
  testing::Spit(dir / "rules.json", R"([{"pattern":"ping","module":"notes","function":"get_all_notes"}])");
  const MockRuleset from_file = MockRuleset::FromFile(dir / "rules.json");
  EXPECT_EQ(MockClassify("ping", from_file, registry_).label, (Label{"notes", "get_all_notes"}));
  EXPECT_THROW(MockRuleset::FromJson(json::object()), Error);
  EXPECT_THROW(MockRuleset::FromJson(json::array({{{"module", "notes"}}})), Error);
}

}  // namespace
}  // namespace nlapi
