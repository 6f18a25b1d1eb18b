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
#include "gateway.hpp"

#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "error.hpp"
#include "support/test_util.hpp"

namespace nlapi {
namespace {

using namespace std::chrono;
using nlohmann::json;
using testing::CountingClassifier;
using testing::MockSpec;

class GatewayTest : public ::testing::Test {
 protected:
  std::unique_ptr<Gateway> Make(std::vector<BackendSpec> specs = {MockSpec("mock")}, std::string history = {},
                                seconds ttl = seconds(300)) {
    GatewayDeps deps;
    deps.clock = clock_;
    deps.cache = std::make_shared<TtlLruCache>(100, ttl, clock_);
    deps.history_path = std::move(history);
    deps.classifier_factory = [this](const BackendSpec& spec) -> std::shared_ptr<Classifier> {
      if (spec.kind == BackendKind::kChatHttp) {
        return std::make_shared<ChatClassifier>(
            spec, std::make_shared<testing::ScriptedTransport>(std::vector<ChatReply>{{500, "", ""}}, false));
      }
      auto c = std::make_shared<CountingClassifier>(spec.id);
      classifiers_[spec.id] = c;
      return c;
    };
    return std::make_unique<Gateway>(std::move(deps), specs, PoolPolicy::kRoundRobin);
  }

  std::shared_ptr<ManualClock> clock_ =
      std::make_shared<ManualClock>(sys_days{year{2024} / January / 15} + hours(12));
  std::map<std::string, std::shared_ptr<CountingClassifier>> classifiers_;
};

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInternal;
}

TEST_F(GatewayTest, AddQueryEndToEnd) {
  auto gw = Make();
  QueryResponse r = gw->HandleQuery({"add 5 and 3", "s1"});
  EXPECT_EQ(r.label, (Label{"calculator", "add"}));
  EXPECT_EQ(r.result.status, ExecStatus::kOk);
  EXPECT_EQ(*r.result.payload, json(8));
  EXPECT_FALSE(r.cached);
  EXPECT_EQ(r.backend_id, "mock");
  EXPECT_FALSE(r.request_id.empty());
  const json j = r.ToJson();
  EXPECT_EQ(j.at("label"), json({"calculator", "add"}));
  EXPECT_EQ(j.at("result").at("payload"), 8);
  for (const char* k : {"params", "cached", "backend_id", "latency_ms", "request_id"}) EXPECT_TRUE(j.contains(k)) << k;
}

TEST_F(GatewayTest, RepeatWithinTtlIsCached) {
  auto gw = Make();
  auto first = gw->HandleQuery({"add 5 and 3", "s1"});
  auto second = gw->HandleQuery({"  ADD 5   and 3 ", "s1"});
  EXPECT_EQ(second.label, first.label);
  EXPECT_TRUE(second.cached);
  EXPECT_EQ(gw->classifier_invocations(), 1u);
  EXPECT_EQ(classifiers_.at("mock")->calls(), 1u);
  clock_->Advance(seconds(301));
  EXPECT_FALSE(gw->HandleQuery({"add 5 and 3", "s1"}).cached);
  EXPECT_EQ(gw->classifier_invocations(), 2u);
}

TEST_F(GatewayTest, InvalidRouteIsPayloadLevel) {
  auto gw = Make();
  auto r = gw->HandleQuery({"tell me a joke", "s1"});
  EXPECT_TRUE(IsInvalidLabel(r.label));
  EXPECT_EQ(r.result.status, ExecStatus::kInvalidRoute);
  EXPECT_EQ(r.result.message, "no matching API route");
}

TEST_F(GatewayTest, BindingFailureIsPayloadLevel) {
  auto gw = Make();
  auto r = gw->HandleQuery({"notification 99: delete it", "s1"});
  EXPECT_EQ(r.label.module, "notification");
  EXPECT_EQ(r.result.status, ExecStatus::kExecError);
}

TEST_F(GatewayTest, RejectsBadRequests) {
  auto gw = Make();
  EXPECT_EQ(CodeOf([&] { gw->HandleQuery({"", "s1"}); }), ErrorCode::kEmptyQuery);
  EXPECT_EQ(CodeOf([&] { gw->HandleQuery({" \t ", "s1"}); }), ErrorCode::kEmptyQuery);
  EXPECT_EQ(CodeOf([&] { gw->HandleQuery({std::string(5000, 'a'), "s1"}); }), ErrorCode::kQueryTooLong);
  EXPECT_EQ(CodeOf([&] { gw->HandleQuery({"add 1 and 2", ""}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { gw->HandleQuery({"add 1 and 2", "bad session!"}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(gw->classifier_invocations(), 0u);
}

TEST_F(GatewayTest, HistoryNewestFirstAndIsolated) {
  auto gw = Make();
  for (const char* q : {"add 1 and 2", "tell me a joke", "add 3 and 4"}) gw->HandleQuery({q, "s1"});
  auto h = gw->GetHistory("s1", 50);
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[0].query, "add 3 and 4");
  EXPECT_EQ(h[2].query, "add 1 and 2");
  EXPECT_GT(h[0].timestamp_us, h[1].timestamp_us);
  EXPECT_EQ(h[1].status, ExecStatus::kInvalidRoute);
  EXPECT_TRUE(gw->GetHistory("s2", 50).empty());
}

TEST_F(GatewayTest, HistoryPagination) {
  auto gw = Make();
  for (const char* q : {"add 1 and 2", "add 2 and 3", "add 3 and 4"}) gw->HandleQuery({q, "s1"});
  auto page = gw->GetHistory("s1", 2);
  ASSERT_EQ(page.size(), 2u);
  auto rest = gw->GetHistory("s1", 2, page.back().timestamp_us);
  ASSERT_EQ(rest.size(), 1u);
  EXPECT_EQ(rest[0].query, "add 1 and 2");
  EXPECT_EQ(CodeOf([&] { gw->GetHistory("s1", 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { gw->GetHistory("s1", Gateway::kMaxHistoryLimit + 1); }), ErrorCode::kInvalidArgument);
}

TEST_F(GatewayTest, HistoryTimestampsStrictlyIncreaseUnderFrozenClock) {
  auto gw = Make();
  for (int i = 0; i < 20; ++i) gw->HandleQuery({"add " + std::to_string(i) + " and 1", "s1"});
  auto h = gw->GetHistory("s1", 50);
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_GT(h[i - 1].timestamp_us, h[i].timestamp_us);
}

TEST_F(GatewayTest, HistoryPersistsAcrossRestart) {
  testing::TempDir dir;
  const std::string path = (dir / "history.jsonl").string();
  {
    auto gw = Make({MockSpec("mock")}, path);
    gw->HandleQuery({"add 1 and 2", "s1"});
    gw->HandleQuery({"add 2 and 3", "s1"});
  }
  std::ofstream(path, std::ios::app) << "{torn";
  auto gw = Make({MockSpec("mock")}, path);
  auto h = gw->GetHistory("s1", 10);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].query, "add 2 and 3");
}

TEST_F(GatewayTest, SetPoolSwapsBackends) {
  auto gw = Make();
  gw->SetPool({MockSpec("alt")}, PoolPolicy::kRoundRobin);
  EXPECT_EQ(gw->HandleQuery({"add 7 and 8", "s1"}).backend_id, "alt");
  EXPECT_EQ(CodeOf([&] { gw->SetPool({}, PoolPolicy::kRoundRobin); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { gw->SetPool({MockSpec("x"), MockSpec("x")}, PoolPolicy::kRoundRobin); }),
            ErrorCode::kConflict);
  EXPECT_EQ(gw->pool()->members().at(0).spec.id, "alt");
}

TEST_F(GatewayTest, HealthReportsUnreachableBackends) {
  auto gw = Make();
  auto ok = gw->Health();
  EXPECT_EQ(ok.status, "ok");
  EXPECT_EQ(ok.registry_version, 1);
  gw->SetPool({MockSpec("mock"), testing::ChatSpec("remote")}, PoolPolicy::kRoundRobin);
  auto degraded = gw->Health();
  EXPECT_EQ(degraded.status, "degraded");
  ASSERT_EQ(degraded.backends.size(), 2u);
  EXPECT_TRUE(degraded.backends[0].reachable);
  EXPECT_FALSE(degraded.backends[1].reachable);
}

TEST_F(GatewayTest, UnavailableBackendSurfacesAsError) {
  auto gw = Make({testing::ChatSpec("remote")});
  EXPECT_EQ(CodeOf([&] { gw->HandleQuery({"add 1 and 2", "s1"}); }), ErrorCode::kClassificationUnavailable);
}

TEST_F(GatewayTest, RoundRobinAcrossThreeBackends) {
  auto gw = Make({MockSpec("a"), MockSpec("b"), MockSpec("c")});
  std::map<std::string, int> served;
  for (int i = 0; i < 30; ++i) ++served[gw->HandleQuery({"add " + std::to_string(i) + " and 1", "s1"}).backend_id];
  EXPECT_EQ(served, (std::map<std::string, int>{{"a", 10}, {"b", 10}, {"c", 10}}));
}

TEST_F(GatewayTest, CrudThroughQueries) {
  auto gw = Make();
  auto created = gw->HandleQuery({"create a note saying buy milk", "s1"});
  ASSERT_EQ(created.label, (Label{"notes", "create"}));
  ASSERT_EQ(created.result.status, ExecStatus::kOk) << created.result.message;
  auto listed = gw->HandleQuery({"show all my notes", "s1"});
  EXPECT_EQ(listed.label, (Label{"notes", "get_all_notes"}));
  EXPECT_EQ(listed.result.payload->size(), 1u);
}

TEST(GatewayConfigTest, ParsesAndResolvesPaths) {
  const json j = {{"listen", "0.0.0.0:9090"},
                  {"cache", {{"ttl_s", 60}, {"capacity", 5}}},
                  {"pool", {{"policy", "least_inflight"}, {"backends", {{{"id", "m"}, {"kind", "mock_rules"},
                                                                          {"ruleset_path", "rules.json"}}}}}},
                  {"history", {{"path", "h.jsonl"}}}};
  const GatewayConfig c = GatewayConfig::FromJson(j, "/etc/nlapi");
  EXPECT_EQ(c.ListenAddress(), (std::pair<std::string, int>{"0.0.0.0", 9090}));
  EXPECT_EQ(c.cache_ttl, seconds(60));
  EXPECT_EQ(c.cache_capacity, 5u);
  EXPECT_EQ(c.policy, PoolPolicy::kLeastInflight);
  EXPECT_EQ(c.backends.at(0).ruleset_path, "/etc/nlapi/rules.json");
  EXPECT_EQ(c.history_path, "/etc/nlapi/h.jsonl");
  EXPECT_EQ(GatewayConfig::FromJson(c.ToJson()).ToJson(), c.ToJson());
}

TEST(GatewayConfigTest, DefaultsToMockBackend) {
  const GatewayConfig c = GatewayConfig::FromJson(json::object());
  ASSERT_EQ(c.backends.size(), 1u);
  EXPECT_EQ(c.backends[0].id, "mock");
  EXPECT_EQ(c.cache_ttl, seconds(300));
}

TEST(GatewayConfigTest, RejectsBadValues) {
  EXPECT_THROW(GatewayConfig::FromJson({{"listen", "nohost"}}), Error);
  EXPECT_THROW(GatewayConfig::FromJson({{"listen", "h:99999"}}), Error);
  EXPECT_THROW(GatewayConfig::FromJson({{"cache", {{"ttl_s", -1}}}}), Error);
  EXPECT_THROW(GatewayConfig::FromJson({{"pool", {{"policy", "random"}}}}), Error);
  EXPECT_THROW(GatewayConfig::FromJson(json::array()), Error);
}

TEST(SessionIdTest, Validation) {
  EXPECT_TRUE(IsValidSessionId("s1"));
  EXPECT_TRUE(IsValidSessionId("A-b_9"));
  EXPECT_TRUE(IsValidSessionId(std::string(64, 'x')));
  EXPECT_FALSE(IsValidSessionId(std::string(65, 'x')));
  EXPECT_FALSE(IsValidSessionId(""));
  EXPECT_FALSE(IsValidSessionId("a b"));
  EXPECT_FALSE(IsValidSessionId("../etc"));
}

}  // namespace
}  // namespace nlapi
