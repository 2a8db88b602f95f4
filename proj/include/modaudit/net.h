// Copyright 2026 The modaudit Authors
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

#ifndef MODAUDIT_NET_H_
#define MODAUDIT_NET_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "modaudit/errors.h"

namespace modaudit::net {

class ConnectionClosed : public Error {
 public:
  using Error::Error;
};

// Owns one connected TCP socket and speaks newline-terminated lines.
// WriteLine may be called from several threads; ReadLine from one.
class Connection {
 public:
  explicit Connection(int fd);
  ~Connection();
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  // Throws ConnectionClosed if the peer is gone.
  void WriteLine(std::string_view line);

  // nullopt on timeout. Throws ConnectionClosed on EOF or socket error.
  std::optional<std::string> ReadLine(std::chrono::milliseconds timeout);

  // Unblocks readers and makes further writes fail.
  void Shutdown();

 private:
  int fd_;
  std::string buffer_;
  std::mutex write_mu_;
};

// Throws ConnectionClosed when the endpoint is unreachable.
std::unique_ptr<Connection> Connect(const std::string& host, uint16_t port);

class Listener {
 public:
  // Port 0 binds an ephemeral port; see port().
  Listener(const std::string& host, uint16_t port);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  uint16_t port() const { return port_; }
  // nullptr on timeout.
  std::unique_ptr<Connection> Accept(std::chrono::milliseconds timeout);

 private:
  int fd_;
  uint16_t port_ = 0;
};

struct Endpoint {
  std::string host;
  uint16_t port = 0;
};

// "host:port"; throws ConfigError.
Endpoint ParseEndpoint(std::string_view s);

}  // namespace modaudit::net

#endif  // MODAUDIT_NET_H_
