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

#include "modaudit/transport.h"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace modaudit {

using namespace std::chrono_literals;

namespace {

Duration BoundaryGap(const RateConfig& rc) {
  return rc.pause_mode == PauseMode::kAdditive ? rc.intra_gap + rc.batch_pause : rc.batch_pause;
}

Duration NextOffset(const RateConfig& rc, std::size_t index, Duration prev) {
  bool boundary = rc.batch_size > 0 && index % static_cast<std::size_t>(rc.batch_size) == 0;
  return prev + (boundary ? BoundaryGap(rc) : rc.intra_gap);
}

std::vector<Duration> ScheduleUnchecked(std::size_t n, const RateConfig& rc) {
  std::vector<Duration> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(i == 0 ? Duration{0} : NextOffset(rc, i, out.back()));
  }
  return out;
}

}  // namespace

void RateConfig::Validate() const {
  if (window_limit < 1) throw ConfigError("window_limit must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (window <= Duration::zero() || intra_gap <= Duration::zero() ||
      batch_pause <= Duration::zero()) {
    throw ConfigError("rate durations must be > 0");
  }
  // The cadence is periodic, so one period plus one window (plus a margin
  // of window_limit sends) exercises every distinct window position.
  const Duration period = (batch_size - 1) * intra_gap + BoundaryGap(*this);
  const std::size_t periods = static_cast<std::size_t>(window / period) + 2;
  const std::size_t horizon =
      periods * static_cast<std::size_t>(batch_size) + static_cast<std::size_t>(window_limit) + 1;
  std::deque<Duration> in_window;
  Duration t{0};
  for (std::size_t i = 0; i < horizon; ++i) {
    if (i > 0) t = NextOffset(*this, i, t);
    while (!in_window.empty() && in_window.front() <= t - window) in_window.pop_front();
    in_window.push_back(t);
    if (in_window.size() > static_cast<std::size_t>(window_limit)) {
      throw ConfigError("rate config puts " + std::to_string(in_window.size()) +
                        " sends into one window (limit " + std::to_string(window_limit) + ")");
    }
  }
}

std::vector<Duration> schedule(std::size_t n, const RateConfig& rc) {
  rc.Validate();
  return ScheduleUnchecked(n, rc);
}

std::size_t MaxInWindow(std::span<const Duration> times, Duration window) {
  std::size_t best = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < times.size(); ++hi) {
    while (times[lo] <= times[hi] - window) ++lo;
    best = std::max(best, hi - lo + 1);
  }
  return best;
}

SteadyClock::SteadyClock() : start_(std::chrono::steady_clock::now()) {}

Duration SteadyClock::Now() {
  return std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now() - start_);
}

void SteadyClock::SleepUntil(Duration t) { std::this_thread::sleep_until(start_ + t); }

LineJsonTarget::LineJsonTarget(net::Endpoint endpoint, std::string channel)
    : endpoint_(std::move(endpoint)), channel_(std::move(channel)) {}

LineJsonTarget::~LineJsonTarget() { Close(); }

namespace {

void Subscribe(net::Connection& conn, const std::string& channel, std::string_view stream) {
  conn.WriteLine(wire::Encode(wire::SubscribeFrame{channel, std::string(stream)}));
  auto deadline = std::chrono::steady_clock::now() + 5s;
  while (std::chrono::steady_clock::now() < deadline) {
    auto line = conn.ReadLine(200ms);
    if (!line) continue;
    auto frame = wire::Decode(*line);
    if (std::holds_alternative<wire::SubscribedFrame>(frame)) return;
    if (const auto* err = std::get_if<wire::ErrorFrame>(&frame)) {
      throw net::ConnectionClosed("subscribe to " + std::string(stream) + " refused: " +
                                  err->reason);
    }
  }
  throw net::ConnectionClosed("no subscription ack for stream " + std::string(stream));
}

}  // namespace

void LineJsonTarget::Connect() {
  sender_ = net::Connect(endpoint_.host, endpoint_.port);
  echo_ = net::Connect(endpoint_.host, endpoint_.port);
  events_ = net::Connect(endpoint_.host, endpoint_.port);
  Subscribe(*echo_, channel_, wire::kChatStream);
  Subscribe(*events_, channel_, wire::kAutomodStream);
}

void LineJsonTarget::Send(const wire::SendFrame& frame) {
  if (!sender_) throw net::ConnectionClosed("not connected");
  sender_->WriteLine(wire::Encode(frame));
}

std::optional<wire::ChatFrame> LineJsonTarget::NextEcho(std::chrono::milliseconds timeout) {
  if (!echo_) throw net::ConnectionClosed("not connected");
  auto line = echo_->ReadLine(timeout);
  if (!line) return std::nullopt;
  auto frame = wire::Decode(*line);
  if (auto* chat = std::get_if<wire::ChatFrame>(&frame)) return std::move(*chat);
  return std::nullopt;
}

std::optional<wire::AutomodEventFrame> LineJsonTarget::NextEvent(
    std::chrono::milliseconds timeout) {
  if (!events_) throw net::ConnectionClosed("not connected");
  auto line = events_->ReadLine(timeout);
  if (!line) return std::nullopt;
  auto frame = wire::Decode(*line);
  if (auto* ev = std::get_if<wire::AutomodEventFrame>(&frame)) return std::move(*ev);
  return std::nullopt;
}

void LineJsonTarget::Close() {
  for (auto* c : {&sender_, &echo_, &events_}) {
    if (*c) (*c)->Shutdown();
    c->reset();
  }
}

std::vector<SentEntry> SendAll(std::span<const Message> messages, const RateConfig& rc,
                               ModerationTarget& target, Clock& clock,
                               const std::string& channel) {
  auto offsets = schedule(messages.size(), rc);
  std::vector<SentEntry> sent;
  sent.reserve(messages.size());
  for (std::size_t i = 0; i < messages.size(); ++i) {
    clock.SleepUntil(offsets[i]);
    SentEntry e{messages[i].id, messages[i].text, offsets[i], clock.Now()};
    target.Send({channel, messages[i].id, messages[i].text});
    sent.push_back(std::move(e));
  }
  return sent;
}

namespace {

// State shared by the three session tasks: the id-resolution set and the
// FIFO text index used when frames arrive without ids.
class Resolution {
 public:
  explicit Resolution(std::size_t expected) : expected_(expected) {}

  void RegisterSend(const std::string& id, const std::string& text) {
    std::lock_guard lock(mu_);
    by_text_[text].push_back(id);
  }

  // Returns the id to log for an observation of `text` carrying `id`.
  std::string Resolve(const std::string& id, const std::string& text) {
    std::lock_guard lock(mu_);
    std::string resolved = id;
    auto it = by_text_.find(text);
    if (resolved.empty()) {
      if (it != by_text_.end() && !it->second.empty()) {
        resolved = it->second.front();
        it->second.pop_front();
      }
    } else if (it != by_text_.end()) {
      auto& q = it->second;
      if (auto pos = std::find(q.begin(), q.end(), resolved); pos != q.end()) q.erase(pos);
    }
    if (!resolved.empty()) done_.insert(resolved);
    cv_.notify_all();
    return resolved;
  }

  void Fail(SessionError::Kind kind, std::string what) {
    std::lock_guard lock(mu_);
    if (!error_) error_ = {kind, std::move(what)};
    cv_.notify_all();
  }

  bool Finished() {
    std::lock_guard lock(mu_);
    return error_.has_value() || done_.size() >= expected_;
  }

  void WaitBriefly() {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, 5ms);
  }

  std::optional<std::pair<SessionError::Kind, std::string>> error() {
    std::lock_guard lock(mu_);
    return error_;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t expected_;
  std::unordered_set<std::string> done_;
  std::unordered_map<std::string, std::deque<std::string>> by_text_;
  std::optional<std::pair<SessionError::Kind, std::string>> error_;
};

}  // namespace

RawLogs run_session(std::span<const Message> messages, ModerationTarget& target,
                    const SessionOptions& options, Clock& clock) {
  {
    std::unordered_set<std::string> ids;
    for (const auto& m : messages) {
      if (!ids.insert(m.id).second) throw ConfigError("duplicate message id " + m.id);
    }
  }
  const auto offsets = schedule(messages.size(), options.rate);
  RawLogs logs;
  if (messages.empty()) return logs;
  try {
    target.Connect();
  } catch (const net::ConnectionClosed& ex) {
    throw SessionError(SessionError::Kind::kConnection, ex.what(), std::move(logs));
  } catch (const ProtocolError& ex) {
    throw SessionError(SessionError::Kind::kProtocol, ex.what(), std::move(logs));
  }

  Resolution res(messages.size());
  std::atomic<bool> stop{false};

  auto echo_task = std::jthread([&] {
    std::unordered_set<std::string> seen;
    try {
      while (!stop) {
        auto frame = target.NextEcho(20ms);
        if (!frame) continue;
        Duration at = clock.Now();
        std::string id = res.Resolve(frame->id, frame->text);
        if (!id.empty() && !seen.insert(id).second) {
          res.Fail(SessionError::Kind::kProtocol, "duplicate id on echo stream: " + id);
        }
        logs.echoes.push_back({id, frame->text, at});
      }
    } catch (const net::ConnectionClosed& ex) {
      if (!stop) res.Fail(SessionError::Kind::kConnection, ex.what());
    } catch (const ProtocolError& ex) {
      res.Fail(SessionError::Kind::kProtocol, ex.what());
    }
  });

  auto event_task = std::jthread([&] {
    std::unordered_set<std::string> seen;
    try {
      while (!stop) {
        auto frame = target.NextEvent(20ms);
        if (!frame) continue;
        Duration at = clock.Now();
        std::string id = res.Resolve(frame->id, frame->text);
        if (!id.empty() && !seen.insert(id).second) {
          res.Fail(SessionError::Kind::kProtocol, "duplicate id on event stream: " + id);
        }
        EventEntry e;
        e.id = id;
        e.text = frame->text;
        e.category = ModerationCategory::Parse(frame->category);
        e.topics = frame->topics;
        for (const auto& f : frame->fragments) e.fragments.push_back(f.text);
        e.level = FilterLevel(std::clamp(frame->level, FilterLevel::kMin, FilterLevel::kMax));
        e.received_at = at;
        logs.events.push_back(std::move(e));
      }
    } catch (const net::ConnectionClosed& ex) {
      if (!stop) res.Fail(SessionError::Kind::kConnection, ex.what());
    } catch (const Error& ex) {
      res.Fail(SessionError::Kind::kProtocol, ex.what());
    }
  });

  struct StopOnExit {
    std::atomic<bool>& flag;
    ~StopOnExit() { flag = true; }
  } stop_on_exit{stop};

  auto finish = [&]() {
    stop = true;
    echo_task.join();
    event_task.join();
    logs.session_end = clock.Now();
  };

  Duration worst_jitter{0};
  std::string worst_id;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (res.error()) break;
    clock.SleepUntil(offsets[i]);
    const Message& m = messages[i];
    res.RegisterSend(m.id, m.text);
    Duration at = clock.Now();
    try {
      target.Send({options.channel, m.id, m.text});
    } catch (const net::ConnectionClosed& ex) {
      res.Fail(SessionError::Kind::kConnection, ex.what());
      break;
    }
    logs.sent.push_back({m.id, m.text, offsets[i], at});
    if (at - offsets[i] > worst_jitter) {
      worst_jitter = at - offsets[i];
      worst_id = m.id;
    }
  }

  if (!res.error()) {
    const Duration deadline = logs.sent.back().sent_at + options.timeout;
    while (!res.Finished() && clock.Now() < deadline) res.WaitBriefly();
  }
  finish();

  if (auto err = res.error()) throw SessionError(err->first, err->second, std::move(logs));
  if (options.enforce_jitter && worst_jitter > options.jitter_bound) {
    throw SessionError(SessionError::Kind::kJitter,
                       "send of " + worst_id + " was " + std::to_string(worst_jitter.count()) +
                           "us late (bound " + std::to_string(options.jitter_bound.count()) +
                           "us)",
                       std::move(logs));
  }
  return logs;
}

}  // namespace modaudit
