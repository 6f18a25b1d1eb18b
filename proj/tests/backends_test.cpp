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
#include "backends.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "error.hpp"
#include "support/test_util.hpp"

namespace nlapi {
namespace {

using nlohmann::json;
using testing::ChatSpec;
using testing::OkReply;
using testing::ScriptedTransport;

const std::string kAddJson = R"({"module":"calculator","function":"add","params":{"a":"5","b":"3"}})";

TEST(ChatClassifierTest, ParsesReply) {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ChatReply>{OkReply(kAddJson)});
  ChatClassifier c(ChatSpec("gpt"), transport);
  auto r = c.Classify("add 5 and 3", Registry::Default());
  EXPECT_EQ(r.label, (Label{"calculator", "add"}));
  EXPECT_EQ(r.params.at("a"), "5");
  EXPECT_EQ(transport->calls(), 1u);
  const auto req = transport->requests().at(0);
  EXPECT_EQ(req.model, "test-model");
  EXPECT_EQ(req.temperature, 0.0);
  ASSERT_EQ(req.messages.size(), 2u);
  EXPECT_EQ(req.messages[0].role, "system");
  EXPECT_EQ(req.messages[1].content, "add 5 and 3");
}

TEST(ChatClassifierTest, ServerErrorsExhaustRetries) {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ChatReply>{{500, "", ""}});
  ChatClassifier c(ChatSpec("gpt"), transport);
  try {
    c.Classify("add 5 and 3", Registry::Default());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClassificationUnavailable);
  }
  EXPECT_EQ(transport->calls(), 3u);
}

TEST(ChatClassifierTest, ClientErrorsAreNotRetried) {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ChatReply>{{401, "", ""}});
  ChatClassifier c(ChatSpec("gpt"), transport);
  EXPECT_THROW(c.Classify("x", Registry::Default()), Error);
  EXPECT_EQ(transport->calls(), 1u);
}

TEST(ChatClassifierTest, RecoversAfterTransientFailure) {
  auto transport = std::make_shared<ScriptedTransport>(
      std::vector<ChatReply>{{503, "", ""}, {0, "", "connection reset"}, OkReply(kAddJson)});
  ChatClassifier c(ChatSpec("gpt"), transport);
  EXPECT_EQ(c.Classify("add 5 and 3", Registry::Default()).label, (Label{"calculator", "add"}));
  EXPECT_EQ(transport->calls(), 3u);
}

TEST(ChatClassifierTest, UnparseableReplyGetsCorrectiveRetry) {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ChatReply>{OkReply("I think it's addition"), OkReply(kAddJson)});
  ChatClassifier c(ChatSpec("gpt"), transport);
  auto r = c.Classify("add 5 and 3", Registry::Default());
  EXPECT_EQ(r.label, (Label{"calculator", "add"}));
  const auto second = transport->requests().at(1);
  ASSERT_EQ(second.messages.size(), 4u);
  EXPECT_EQ(second.messages[3].content, kCorrectiveInstruction);
}

TEST(ChatClassifierTest, PersistentlyUnparseableIsFlaggedNotThrown) {
  auto transport = std::make_shared<ScriptedTransport>(std::vector<ChatReply>{OkReply("nope")});
  ChatClassifier c(ChatSpec("gpt"), transport);
  auto r = c.Classify("add 5 and 3", Registry::Default());
  EXPECT_TRUE(IsInvalidLabel(r.label));
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics.back(), kBackendUnparseable);
}

TEST(ExtractReplyContentTest, HandlesShapes) {
  EXPECT_EQ(*ExtractReplyContent(OkReply("hi").body), "hi");
  EXPECT_FALSE(ExtractReplyContent("not json"));
  EXPECT_FALSE(ExtractReplyContent(R"({"choices":[]})"));
  EXPECT_FALSE(ExtractReplyContent(R"({"choices":[{"message":{"content":7}}]})"));
}

// Minimal chat-completions server on an ephemeral port.
class FakeChatServer {
 public:
  explicit FakeChatServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    server_.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST(HttpChatTransportTest, SendsBearerTokenFromEnvironment) {
  std::string seen_auth;
  json seen_body;
  FakeChatServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = json::parse(req.body);
    res.set_content(OkReply(kAddJson).body, "application/json");
  });
  setenv("NLAPI_TEST_KEY", "sk-test-123", 1);
  BackendSpec spec = ChatSpec("gpt", server.endpoint());
  spec.credentials_ref = "NLAPI_TEST_KEY";
  auto classifier = MakeClassifier(spec, DefaultTransportFactory());
  auto r = classifier->Classify("add 5 and 3", Registry::Default());
  EXPECT_EQ(r.label, (Label{"calculator", "add"}));
  EXPECT_EQ(seen_auth, "Bearer sk-test-123");
  EXPECT_EQ(seen_body.at("model"), "test-model");
  EXPECT_EQ(seen_body.at("messages").size(), 2u);
  EXPECT_TRUE(classifier->Reachable());
  EXPECT_EQ(spec.ToJson().dump().find("sk-test-123"), std::string::npos);
  unsetenv("NLAPI_TEST_KEY");
}

TEST(HttpChatTransportTest, UnreachableEndpoint) {
  BackendSpec spec = ChatSpec("gpt", "http://127.0.0.1:1/v1/chat/completions");
  spec.timeout = std::chrono::milliseconds(200);
  auto classifier = MakeClassifier(spec, DefaultTransportFactory());
  EXPECT_FALSE(classifier->Reachable());
  try {
    classifier->Classify("add 1 and 2", Registry::Default());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClassificationUnavailable);
  }
}

TEST(MakePoolTest, RejectsEmptyAndDuplicateIds) {
  EXPECT_THROW(MakePool({}, PoolPolicy::kRoundRobin, DefaultTransportFactory()), Error);
  try {
    MakePool({testing::MockSpec("a"), testing::MockSpec("a")}, PoolPolicy::kRoundRobin, DefaultTransportFactory());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
  auto pool = MakePool({testing::MockSpec("a"), testing::MockSpec("b")}, PoolPolicy::kRoundRobin,
                       DefaultTransportFactory());
  EXPECT_EQ(pool->members().size(), 2u);
}

}  // namespace
}  // namespace nlapi
