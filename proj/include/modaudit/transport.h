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

#ifndef MODAUDIT_TRANSPORT_H_
#define MODAUDIT_TRANSPORT_H_

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modaudit/core.h"
#include "modaudit/errors.h"
#include "modaudit/net.h"
#include "modaudit/wire.h"

namespace modaudit {

using Duration = std::chrono::microseconds;

// Whether batch_pause is added to the last intra-batch gap or replaces it.
enum class PauseMode { kAdditive, kReplace };

// Sender pacing. Defaults send bursts of 5 messages 4 s apart with an extra
// 3.5 s pause after each burst, under a 20-per-30 s sliding window.
struct RateConfig {
  int window_limit = 20;
  Duration window = std::chrono::seconds(30);
  int batch_size = 5;
  Duration intra_gap = std::chrono::seconds(4);
  Duration batch_pause = std::chrono::milliseconds(3500);
  PauseMode pause_mode = PauseMode::kAdditive;

  // Throws ConfigError for non-positive values or a cadence that would put
  // more than window_limit sends into some window.
  void Validate() const;
};

// Send offsets from session start. Validates `rc` first.
std::vector<Duration> schedule(std::size_t n, const RateConfig& rc);

// Largest number of times falling in any half-open interval (t - window, t].
// `times` must be sorted.
std::size_t MaxInWindow(std::span<const Duration> times, Duration window);

class Clock {
 public:
  virtual ~Clock() = default;
  // Time since the clock's epoch (session start).
  virtual Duration Now() = 0;
  virtual void SleepUntil(Duration t) = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock();
  Duration Now() override;
  void SleepUntil(Duration t) override;

 private:
  std::chrono::steady_clock::time_point start_;
};

// Time advances only through SleepUntil/Advance.
class VirtualClock final : public Clock {
 public:
  Duration Now() override { return now_; }
  void SleepUntil(Duration t) override {
    if (t > now_) now_ = t;
  }
  void Advance(Duration d) { now_ += d; }

 private:
  Duration now_{0};
};

// Client side of a moderation target. An adapter owns connection set-up and
// authentication; the harness only needs these four calls. NextEcho and
// NextEvent are each called from a single dedicated thread, concurrently
// with Send on a third. Frames may leave `id` empty when the target echoes
// only text; the harness then matches by text.
class ModerationTarget {
 public:
  virtual ~ModerationTarget() = default;
  virtual void Connect() = 0;
  virtual void Send(const wire::SendFrame& frame) = 0;
  // nullopt on timeout; throws net::ConnectionClosed on connection loss.
  virtual std::optional<wire::ChatFrame> NextEcho(std::chrono::milliseconds timeout) = 0;
  virtual std::optional<wire::AutomodEventFrame> NextEvent(std::chrono::milliseconds timeout) = 0;
  virtual void Close() {}
};

// Adapter for the line-JSON protocol: one sender connection plus one
// subscribed connection per observation stream.
class LineJsonTarget final : public ModerationTarget {
 public:
  LineJsonTarget(net::Endpoint endpoint, std::string channel);
  ~LineJsonTarget() override;

  void Connect() override;
  void Send(const wire::SendFrame& frame) override;
  std::optional<wire::ChatFrame> NextEcho(std::chrono::milliseconds timeout) override;
  std::optional<wire::AutomodEventFrame> NextEvent(std::chrono::milliseconds timeout) override;
  void Close() override;

  const std::string& channel() const { return channel_; }

 private:
  net::Endpoint endpoint_;
  std::string channel_;
  std::unique_ptr<net::Connection> sender_;
  std::unique_ptr<net::Connection> echo_;
  std::unique_ptr<net::Connection> events_;
};

struct SentEntry {
  std::string id;
  std::string text;
  Duration scheduled{0};
  Duration sent_at{0};
};

struct EchoEntry {
  std::string id;
  std::string text;
  Duration received_at{0};
};

struct EventEntry {
  std::string id;
  std::string text;
  ModerationCategory category = ModerationCategory::Racism();
  std::vector<std::string> topics;
  std::vector<std::string> fragments;
  FilterLevel level;
  Duration received_at{0};
};

struct RawLogs {
  std::vector<SentEntry> sent;
  std::vector<EchoEntry> echoes;
  std::vector<EventEntry> events;
  Duration session_end{0};
};

class SessionError : public Error {
 public:
  enum class Kind { kConnection, kProtocol, kJitter };
  SessionError(Kind kind, const std::string& what, RawLogs partial)
      : Error(what), kind_(kind), partial_(std::move(partial)) {}
  Kind kind() const { return kind_; }
  const RawLogs& partial() const { return partial_; }

 private:
  Kind kind_;
  RawLogs partial_;
};

struct SessionOptions {
  RateConfig rate;
  // Wait after the last send before unresolved ids count as prefiltered.
  Duration timeout = std::chrono::seconds(10);
  Duration jitter_bound = std::chrono::milliseconds(100);
  bool enforce_jitter = true;
  std::string channel = "audit";
};

// Sends every message at its scheduled offset, recording the send time just
// before each frame leaves. Used by run_session; exposed for replay against
// virtual clocks.
std::vector<SentEntry> SendAll(std::span<const Message> messages, const RateConfig& rc,
                               ModerationTarget& target, Clock& clock, const std::string& channel);

// Runs sender, echo consumer and event consumer concurrently until every id
// is observed or `timeout` has elapsed after the last send. Throws
// ConfigError on duplicate input ids and SessionError (carrying partial logs)
// on connection loss, duplicate stream ids or jitter violations.
RawLogs run_session(std::span<const Message> messages, ModerationTarget& target,
                    const SessionOptions& options, Clock& clock);

}  // namespace modaudit

#endif  // MODAUDIT_TRANSPORT_H_
