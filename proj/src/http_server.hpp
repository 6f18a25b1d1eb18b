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

#include <memory>
#include <string>

#include "error.hpp"
#include "gateway.hpp"

namespace nlapi {

// Maps a core error code onto an HTTP status.
int HttpStatusFor(ErrorCode code);

// Serves the gateway's JSON endpoints:
//   POST /v1/query, GET /v1/history, GET /v1/health, PUT /v1/admin/pool
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<Gateway> gateway);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds without serving. Port 0 picks a free port. Returns the bound port.
  int Bind(const std::string& host, int port);

  // Blocks until Stop().
  void Serve();

  // Serves on a background thread.
  void Start();
  void Stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nlapi
