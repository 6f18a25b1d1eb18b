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
#include "http_server.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include "support/test_util.hpp"

namespace nlapi {
namespace {

using nlohmann::json;

class HttpServerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    GatewayDeps deps;
    deps.classifier_factory = [](const BackendSpec& spec) -> std::shared_ptr<Classifier> {
      if (spec.kind == BackendKind::kChatHttp) {
        return std::make_shared<ChatClassifier>(
            spec, std::make_shared<testing::ScriptedTransport>(std::vector<ChatReply>{{500, "", ""}}, false));
      }
      return std::make_shared<testing::CountingClassifier>(spec.id);
    };
    gateway_ = std::make_shared<Gateway>(std::move(deps), std::vector<BackendSpec>{testing::MockSpec("mock")},
                                         PoolPolicy::kRoundRobin);
    server_ = std::make_unique<HttpServer>(gateway_);
    port_ = server_->Bind("127.0.0.1", 0);
    server_->Start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override { server_->Stop(); }

  httplib::Result Query(const std::string& text, const std::string& session = "s1") {
    return client_->Post("/v1/query", json({{"text", text}, {"session_id", session}}).dump(), "application/json");
  }

  std::shared_ptr<Gateway> gateway_;
  std::unique_ptr<HttpServer> server_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(HttpServerTest, QueryReturnsResponse) {
  auto res = Query("add 5 and 3");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json j = json::parse(res->body);
  EXPECT_EQ(j.at("label"), json({"calculator", "add"}));
  EXPECT_EQ(j.at("result").at("payload"), 8);
  EXPECT_EQ(j.at("result").at("status"), "ok");
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(HttpServerTest, InvalidRouteIs200WithMessage) {
  auto res = Query("tell me a joke");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json j = json::parse(res->body);
  EXPECT_EQ(j.at("label"), json({"routes_not_exist", "return_invalid_error"}));
  EXPECT_EQ(j.at("result").at("status"), "invalid_route");
  EXPECT_EQ(j.at("result").at("message"), "no matching API route");
}

TEST_F(HttpServerTest, BadRequestsAre400) {
  for (const std::string body : {"not json", "{}", R"({"text":5,"session_id":"s"})", R"({"text":"","session_id":"s"})",
                                 R"({"text":"hi","session_id":"has space"})", "[]"}) {
    auto res = client_->Post("/v1/query", body, "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400) << body;
    EXPECT_TRUE(json::parse(res->body).at("error").contains("code")) << body;
  }
  auto long_query = Query(std::string(4001, 'a'));
  EXPECT_EQ(long_query->status, 400);
  EXPECT_EQ(json::parse(long_query->body)["error"]["code"], "query_too_long");
}

TEST_F(HttpServerTest, HistoryEndpoint) {
  Query("add 1 and 2");
  Query("add 2 and 3");
  Query("add 3 and 4");
  auto res = client_->Get("/v1/history?session_id=s1&limit=2");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const json page = json::parse(res->body);
  ASSERT_EQ(page.at("entries").size(), 2u);
  EXPECT_EQ(page["entries"][0]["query"], "add 3 and 4");
  const auto before = page["entries"][1]["timestamp"].get<std::int64_t>();
  auto rest = client_->Get("/v1/history?session_id=s1&limit=2&before=" + std::to_string(before));
  const json tail = json::parse(rest->body);
  ASSERT_EQ(tail.at("entries").size(), 1u);
  EXPECT_EQ(tail["entries"][0]["query"], "add 1 and 2");
  EXPECT_EQ(json::parse(client_->Get("/v1/history?session_id=s2")->body).at("entries").size(), 0u);
  EXPECT_EQ(client_->Get("/v1/history?session_id=s1&limit=abc")->status, 400);
  EXPECT_EQ(client_->Get("/v1/history?session_id=s1&limit=0")->status, 400);
  EXPECT_EQ(client_->Get("/v1/history?session_id=s1&limit=501")->status, 400);
  EXPECT_EQ(client_->Get("/v1/history")->status, 400);
}

TEST_F(HttpServerTest, HealthEndpoint) {
  auto res = client_->Get("/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const json j = json::parse(res->body);
  EXPECT_EQ(j.at("status"), "ok");
  EXPECT_EQ(j.at("registry_version"), 1);
  EXPECT_EQ(j.at("backends")[0]["id"], "mock");
}

TEST_F(HttpServerTest, AdminPoolEndpoint) {
  auto res = client_->Put("/v1/admin/pool",
                          R"({"policy":"round_robin","backends":[{"id":"alt","kind":"mock_rules"}]})",
                          "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(Query("add 5 and 6")->body).at("backend_id"), "alt");

  EXPECT_EQ(client_->Put("/v1/admin/pool", R"({"backends":[]})", "application/json")->status, 400);
  EXPECT_EQ(client_->Put("/v1/admin/pool", R"([])", "application/json")->status, 400);
  EXPECT_EQ(client_->Put("/v1/admin/pool",
                         R"({"backends":[{"id":"x","kind":"mock_rules"},{"id":"x","kind":"mock_rules"}]})",
                         "application/json")->status,
            409);
  EXPECT_EQ(client_->Put("/v1/admin/pool", R"({"pool":{"backends":[{"id":"p","kind":"mock_rules"}]}})",
                         "application/json")->status,
            200);
  EXPECT_EQ(client_->Put("/v1/admin/pool", R"({"backends":[{"id":"c","kind":"chat_http"}]})", "application/json")->status,
            400);
}

TEST_F(HttpServerTest, UnavailableBackendIs503) {
  auto res = client_->Put("/v1/admin/pool",
                          R"({"backends":[{"id":"remote","kind":"chat_http","endpoint":"http://127.0.0.1:1/x","model_name":"m"}]})",
                          "application/json");
  ASSERT_EQ(res->status, 200);
  auto q = Query("add 1 and 2");
  EXPECT_EQ(q->status, 503);
  EXPECT_EQ(json::parse(q->body)["error"]["code"], "classification_unavailable");
  EXPECT_EQ(json::parse(client_->Get("/v1/health")->body).at("status"), "degraded");
}

TEST_F(HttpServerTest, PreflightAndUnknownRoutes) {
  auto pre = client_->Options("/v1/query");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Methods"), "GET, POST, PUT, OPTIONS");
  EXPECT_EQ(client_->Get("/v1/nothing")->status, 404);
}

TEST(HttpStatusTest, Mapping) {
  EXPECT_EQ(HttpStatusFor(ErrorCode::kInvalidArgument), 400);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kEmptyQuery), 400);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kConflict), 409);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kClassificationUnavailable), 503);
  EXPECT_EQ(HttpStatusFor(ErrorCode::kInternal), 500);
}

}  // namespace
}  // namespace nlapi
