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

#include <charconv>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "error.hpp"

namespace nlapi {

using nlohmann::json;

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kMalformedDocument:
    case ErrorCode::kEmptyQuery:
    case ErrorCode::kQueryTooLong:
      return 400;
    case ErrorCode::kConflict:
    case ErrorCode::kDuplicateName:
      return 409;
    case ErrorCode::kClassificationUnavailable:
    case ErrorCode::kBackendUnavailable:
      return 503;
    default:
      return 500;
  }
}

namespace {

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

void ReplyError(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  Reply(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

// Runs fn, translating exceptions into JSON error replies.
template <typename Fn>
void Guard(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    const int status = HttpStatusFor(e.code());
    if (status >= 500) spdlog::warn("request failed: {}", e.what());
    ReplyError(res, status, ToString(e.code()), e.what());
  } catch (const json::exception& e) {
    ReplyError(res, 400, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    ReplyError(res, 500, "internal", e.what());
  }
}

json ParseBody(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::optional<std::int64_t> IntParam(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  const std::string v = req.get_param_value(name);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be an integer");
  }
  return out;
}

}  // namespace

struct HttpServer::Impl {
  std::shared_ptr<Gateway> gateway;
  httplib::Server server;
  std::thread thread;
  int port = -1;
};

HttpServer::HttpServer(std::shared_ptr<Gateway> gateway) : impl_(std::make_unique<Impl>()) {
  impl_->gateway = std::move(gateway);
  auto& srv = impl_->server;
  Gateway* gw = impl_->gateway.get();

  // Headers and body go out in separate writes; without this, keep-alive
  // clients stall on delayed ACKs.
  srv.set_tcp_nodelay(true);
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"},
                           {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"}});
  srv.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Post("/v1/query", [gw](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      QueryRequest q = QueryRequest::FromJson(ParseBody(req));
      Reply(res, 200, gw->HandleQuery(q).ToJson());
    });
  });

  srv.Get("/v1/history", [gw](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const std::string session = req.get_param_value("session_id");
      const std::int64_t limit = IntParam(req, "limit").value_or(50);
      if (limit < 1 || limit > Gateway::kMaxHistoryLimit) {
        throw Error(ErrorCode::kInvalidArgument, "limit must be in [1, 500]");
      }
      json entries = json::array();
      for (const auto& e : gw->GetHistory(session, static_cast<int>(limit), IntParam(req, "before"))) {
        entries.push_back(e.ToJson());
      }
      Reply(res, 200, {{"session_id", session}, {"entries", entries}});
    });
  });

  srv.Get("/v1/health", [gw](const httplib::Request&, httplib::Response& res) {
    Guard(res, [&] { Reply(res, 200, gw->Health().ToJson()); });
  });

  srv.Put("/v1/admin/pool", [gw](const httplib::Request& req, httplib::Response& res) {
    Guard(res, [&] {
      const json body = ParseBody(req);
      const json* list = &body;
      PoolPolicy policy = PoolPolicy::kRoundRobin;
      if (body.is_object()) {
        if (body.contains("pool")) {
          const json& pool = body.at("pool");
          policy = ParsePoolPolicy(pool.value("policy", std::string("round_robin")));
          list = &pool.at("backends");
        } else {
          policy = ParsePoolPolicy(body.value("policy", std::string("round_robin")));
          list = &body.at("backends");
        }
      }
      if (!list->is_array()) throw Error(ErrorCode::kInvalidArgument, "backends must be an array");
      std::vector<BackendSpec> specs;
      for (const auto& b : *list) specs.push_back(BackendSpec::FromJson(b));
      gw->SetPool(specs, policy);
      json ids = json::array();
      for (const auto& s : specs) ids.push_back(s.id);
      Reply(res, 200, {{"ok", true}, {"policy", std::string(ToString(policy))}, {"backends", ids}});
    });
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    spdlog::error("unhandled exception: {}", what);
    ReplyError(res, 500, "internal", what);
  });
}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    impl_->port = port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
  return impl_->port;
}

void HttpServer::Serve() {
  if (impl_->port < 0) throw Error(ErrorCode::kInternal, "Serve() before Bind()");
  impl_->server.listen_after_bind();
}

void HttpServer::Start() {
  if (impl_->port < 0) throw Error(ErrorCode::kInternal, "Start() before Bind()");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int HttpServer::port() const { return impl_->port; }

}  // namespace nlapi
