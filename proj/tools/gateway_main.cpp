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
// gateway: serve the query API over HTTP, or answer one query locally.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli_common.hpp"

using nlapi_cli::CString;
using nlapi_cli::OrNull;
using nlapi_cli::Report;

namespace {

int Serve(const std::string& config, const std::string& host, int port) {
  // Block the signals before any thread starts so sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  nlapi_gateway* gw = nullptr;
  if (auto st = nlapi_gateway_open(OrNull(config), &gw); st != NLAPI_OK) return Report(st);
  nlapi_server* server = nullptr;
  if (auto st = nlapi_server_create(gw, OrNull(host), port, &server); st != NLAPI_OK) {
    nlapi_gateway_free(gw);
    return Report(st);
  }
  if (auto st = nlapi_server_start(server); st != NLAPI_OK) {
    nlapi_server_free(server);
    nlapi_gateway_free(gw);
    return Report(st);
  }
  std::fprintf(stderr, "listening on port %d\n", nlapi_server_port(server));
  int sig = 0;
  sigwait(&set, &sig);
  std::fprintf(stderr, "shutting down\n");
  nlapi_server_stop(server);
  nlapi_server_free(server);
  nlapi_gateway_free(gw);
  return 0;
}

int Query(const std::string& config, const std::string& text, const std::string& session) {
  nlapi_gateway* gw = nullptr;
  if (auto st = nlapi_gateway_open(OrNull(config), &gw); st != NLAPI_OK) return Report(st);
  int http = 0;
  CString body;
  const nlapi_status st = nlapi_gateway_query(gw, text.c_str(), session.c_str(), &http, body.out());
  nlapi_gateway_free(gw);
  std::cout << body.str() << "\n";
  return st == NLAPI_OK ? 0 : (st == NLAPI_ERR_INVALID_ARGUMENT || st == NLAPI_ERR_EMPTY_QUERY ||
                                       st == NLAPI_ERR_QUERY_TOO_LONG
                                   ? 2
                                   : 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-language API gateway"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  std::string config, host, text, session = "cli";
  int port = -1;

  auto* serve = app.add_subcommand("serve", "Run the HTTP server until SIGINT or SIGTERM");
  serve->add_option("--config", config, "Gateway config file")->check(CLI::ExistingFile);
  serve->add_option("--host", host, "Override the listen host");
  serve->add_option("--port", port, "Override the listen port (0 picks a free port)");

  auto* query = app.add_subcommand("query", "Classify and execute one query without a server");
  query->add_option("--config", config, "Gateway config file")->check(CLI::ExistingFile);
  query->add_option("--text", text, "Query text")->required();
  query->add_option("--session", session, "Session id recorded in history");

  CLI11_PARSE(app, argc, argv);
  if (auto st = nlapi_set_log_level(log_level.c_str()); st != NLAPI_OK) return Report(st);
  if (*serve) return Serve(config, host, port);
  return Query(config, text, session);
}
