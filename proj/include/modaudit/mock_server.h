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

#ifndef MODAUDIT_MOCK_SERVER_H_
#define MODAUDIT_MOCK_SERVER_H_

#include <atomic>
#include <cstdint>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "modaudit/moderation.h"
#include "modaudit/net.h"
#include "modaudit/wire.h"

namespace modaudit {

// Frame produced for one send: a chat echo, an automod event, or nothing
// when the text was prefiltered.
std::optional<wire::Frame> Route(const wire::SendFrame& send, const ChannelState& state);

// Reference moderation service speaking the line-JSON protocol. One handler
// thread per connection; channel state is immutable once started.
class MockServer {
 public:
  struct Stats {
    std::atomic<uint64_t> sends{0};
    std::atomic<uint64_t> echoes{0};
    std::atomic<uint64_t> events{0};
    std::atomic<uint64_t> prefiltered{0};
    std::atomic<uint64_t> errors{0};
  };

  // Throws ConfigError on duplicate channel ids.
  explicit MockServer(std::vector<ChannelState> channels);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  // Binds and starts accepting. Returns the bound port.
  uint16_t Start(const std::string& host = "127.0.0.1", uint16_t port = 0);
  void Stop();

  uint16_t port() const { return listener_ ? listener_->port() : 0; }
  const Stats& stats() const { return stats_; }

 private:
  struct Subscription {
    std::string channel;
    std::string stream;
    std::shared_ptr<net::Connection> conn;
  };

  void AcceptLoop();
  void Serve(std::shared_ptr<net::Connection> conn);
  void HandleLine(const std::shared_ptr<net::Connection>& conn, const std::string& line);
  void Broadcast(const std::string& channel, std::string_view stream, const wire::Frame& frame);
  void Unsubscribe(const std::shared_ptr<net::Connection>& conn);

  std::map<std::string, ChannelState> channels_;
  std::unique_ptr<net::Listener> listener_;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;

  std::mutex mu_;
  std::list<std::thread> workers_;
  std::vector<std::shared_ptr<net::Connection>> open_;
  std::vector<Subscription> subs_;
  Stats stats_;
};

}  // namespace modaudit

#endif  // MODAUDIT_MOCK_SERVER_H_
