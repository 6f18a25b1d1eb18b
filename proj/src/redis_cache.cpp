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
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include <spdlog/spdlog.h>

#include "cache.hpp"
#include "error.hpp"

namespace nlapi {

namespace {

class Socket {
 public:
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() {
    if (fd_ >= 0) ::close(fd_);
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_;
};

bool WaitFor(int fd, short events, std::chrono::milliseconds timeout) {
  pollfd p{fd, events, 0};
  int rc;
  do {
    rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
  } while (rc < 0 && errno == EINTR);
  return rc > 0 && (p.revents & events);
}

// Buffered reader for RESP replies.
class Reader {
 public:
  Reader(int fd, std::chrono::milliseconds timeout) : fd_(fd), timeout_(timeout) {}

  std::optional<std::string> Line() {
    for (;;) {
      auto pos = buf_.find("\r\n");
      if (pos != std::string::npos) {
        std::string line = buf_.substr(0, pos);
        buf_.erase(0, pos + 2);
        return line;
      }
      if (!Fill()) return std::nullopt;
    }
  }

  std::optional<std::string> Exactly(std::size_t n) {
    while (buf_.size() < n + 2) {
      if (!Fill()) return std::nullopt;
    }
    std::string out = buf_.substr(0, n);
    buf_.erase(0, n + 2);
    return out;
  }

 private:
  bool Fill() {
    if (!WaitFor(fd_, POLLIN, timeout_)) return false;
    char tmp[4096];
    ssize_t n = ::recv(fd_, tmp, sizeof(tmp), 0);
    if (n <= 0) return false;
    buf_.append(tmp, static_cast<std::size_t>(n));
    return true;
  }

  int fd_;
  std::chrono::milliseconds timeout_;
  std::string buf_;
};

}  // namespace

RedisCache::RedisCache(std::string url, std::chrono::milliseconds ttl, std::chrono::milliseconds io_timeout)
    : ttl_(ttl), io_timeout_(io_timeout) {
  constexpr std::string_view kScheme = "redis://";
  std::string_view rest = url;
  if (rest.substr(0, kScheme.size()) == kScheme) rest.remove_prefix(kScheme.size());
  if (auto slash = rest.find('/'); slash != std::string_view::npos) rest = rest.substr(0, slash);
  auto colon = rest.rfind(':');
  host_ = std::string(rest.substr(0, colon));
  if (colon != std::string_view::npos) {
    auto port = rest.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), port_);
    if (ec != std::errc() || ptr != port.data() + port.size() || port_ <= 0 || port_ > 65535) {
      throw Error(ErrorCode::kInvalidArgument, "bad cache url port: " + url);
    }
  }
  if (host_.empty()) throw Error(ErrorCode::kInvalidArgument, "bad cache url: " + url);
}

std::optional<std::string> RedisCache::Command(const std::vector<std::string>& args) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host_.c_str(), std::to_string(port_).c_str(), &hints, &res) != 0 || !res) {
    spdlog::warn("cache server {} does not resolve", host_);
    return std::nullopt;
  }
  std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
  Socket sock(::socket(res->ai_family, res->ai_socktype | SOCK_NONBLOCK, res->ai_protocol));
  if (sock.fd() < 0) return std::nullopt;
  if (::connect(sock.fd(), res->ai_addr, res->ai_addrlen) != 0) {
    if (errno != EINPROGRESS || !WaitFor(sock.fd(), POLLOUT, io_timeout_)) {
      spdlog::warn("cache server {}:{} unreachable", host_, port_);
      return std::nullopt;
    }
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      spdlog::warn("cache server {}:{} unreachable: {}", host_, port_, std::strerror(err));
      return std::nullopt;
    }
  }

  std::string wire = "*" + std::to_string(args.size()) + "\r\n";
  for (const auto& a : args) wire += "$" + std::to_string(a.size()) + "\r\n" + a + "\r\n";
  std::size_t sent = 0;
  while (sent < wire.size()) {
    if (!WaitFor(sock.fd(), POLLOUT, io_timeout_)) return std::nullopt;
    ssize_t n = ::send(sock.fd(), wire.data() + sent, wire.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return std::nullopt;
    sent += static_cast<std::size_t>(n);
  }

  Reader reader(sock.fd(), io_timeout_);
  auto line = reader.Line();
  if (!line || line->empty()) return std::nullopt;
  switch ((*line)[0]) {
    case '+':
      return line->substr(1);
    case '$': {
      long long n = -1;
      std::from_chars(line->data() + 1, line->data() + line->size(), n);
      if (n < 0) return std::nullopt;
      return reader.Exactly(static_cast<std::size_t>(n));
    }
    case '-':
      spdlog::warn("cache server error: {}", line->substr(1));
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

std::optional<ClassificationResult> RedisCache::Lookup(const std::string& key) {
  auto reply = Command({"GET", key});
  if (!reply) return std::nullopt;
  try {
    ClassificationResult out = ClassificationResult::FromJson(nlohmann::json::parse(*reply));
    out.cached = true;
    return out;
  } catch (const std::exception& e) {
    spdlog::warn("discarding unreadable cache entry: {}", e.what());
    return std::nullopt;
  }
}

void RedisCache::Store(const std::string& key, const ClassificationResult& value,
                       std::optional<std::chrono::milliseconds> ttl) {
  const auto ms = ttl.value_or(ttl_).count();
  if (ms <= 0) return;
  Command({"SET", key, value.ToJson().dump(), "PX", std::to_string(ms)});
}

}  // namespace nlapi
