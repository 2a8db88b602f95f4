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

#include "modaudit/mock_server.h"

#include <algorithm>
#include <chrono>

namespace modaudit {

using namespace std::chrono_literals;

std::optional<wire::Frame> Route(const wire::SendFrame& send, const ChannelState& state) {
  Outcome outcome = moderate(send.text, state);
  if (std::holds_alternative<Passed>(outcome)) {
    return wire::ChatFrame{send.channel, send.id, send.text};
  }
  if (const auto* m = std::get_if<Moderated>(&outcome)) {
    wire::AutomodEventFrame ev;
    ev.channel = send.channel;
    ev.id = send.id;
    ev.text = send.text;
    ev.category = m->category.name();
    ev.topics = {state.categories.CriterionFor(m->category).name()};
    for (const auto& f : m->fragments) ev.fragments.push_back({f, m->category.name()});
    ev.level = m->level.value();
    return ev;
  }
  return std::nullopt;
}

MockServer::MockServer(std::vector<ChannelState> channels) {
  for (auto& c : channels) {
    c.Validate();
    std::string id = c.channel;
    if (!channels_.emplace(id, std::move(c)).second) {
      throw ConfigError("duplicate channel " + id);
    }
  }
}

MockServer::~MockServer() { Stop(); }

uint16_t MockServer::Start(const std::string& host, uint16_t port) {
  listener_ = std::make_unique<net::Listener>(host, port);
  stopping_ = false;
  accept_thread_ = std::thread([this] { AcceptLoop(); });
  return listener_->port();
}

void MockServer::Stop() {
  if (stopping_.exchange(true)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  std::list<std::thread> workers;
  {
    std::lock_guard lock(mu_);
    for (auto& c : open_) c->Shutdown();
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  std::lock_guard lock(mu_);
  open_.clear();
  subs_.clear();
}

void MockServer::AcceptLoop() {
  while (!stopping_) {
    auto conn = listener_->Accept(50ms);
    if (!conn) continue;
    std::shared_ptr<net::Connection> shared(std::move(conn));
    std::lock_guard lock(mu_);
    if (stopping_) {
      shared->Shutdown();
      break;
    }
    open_.push_back(shared);
    workers_.emplace_back([this, shared] { Serve(shared); });
  }
}

void MockServer::Serve(std::shared_ptr<net::Connection> conn) {
  try {
    while (!stopping_) {
      auto line = conn->ReadLine(100ms);
      if (!line) continue;
      if (line->empty()) continue;
      HandleLine(conn, *line);
    }
  } catch (const net::ConnectionClosed&) {
  }
  Unsubscribe(conn);
}

void MockServer::HandleLine(const std::shared_ptr<net::Connection>& conn,
                            const std::string& line) {
  auto reply_error = [&](const std::string& reason) {
    ++stats_.errors;
    try {
      conn->WriteLine(wire::Encode(wire::ErrorFrame{reason}));
    } catch (const net::ConnectionClosed&) {
    }
  };

  wire::Frame frame;
  try {
    frame = wire::Decode(line);
  } catch (const ProtocolError& ex) {
    reply_error(ex.what());
    return;
  }

  if (const auto* send = std::get_if<wire::SendFrame>(&frame)) {
    auto it = channels_.find(send->channel);
    if (it == channels_.end()) {
      reply_error("unknown channel '" + send->channel + "'");
      return;
    }
    ++stats_.sends;
    auto routed = Route(*send, it->second);
    if (!routed) {
      ++stats_.prefiltered;
    } else if (std::holds_alternative<wire::ChatFrame>(*routed)) {
      ++stats_.echoes;
      Broadcast(send->channel, wire::kChatStream, *routed);
    } else {
      ++stats_.events;
      Broadcast(send->channel, wire::kAutomodStream, *routed);
    }
    return;
  }
  if (const auto* sub = std::get_if<wire::SubscribeFrame>(&frame)) {
    if (!channels_.contains(sub->channel)) {
      reply_error("unknown channel '" + sub->channel + "'");
      return;
    }
    if (sub->stream != wire::kChatStream && sub->stream != wire::kAutomodStream) {
      reply_error("unknown stream '" + sub->stream + "'");
      return;
    }
    {
      std::lock_guard lock(mu_);
      subs_.push_back({sub->channel, sub->stream, conn});
    }
    try {
      conn->WriteLine(wire::Encode(wire::SubscribedFrame{sub->channel, sub->stream}));
    } catch (const net::ConnectionClosed&) {
    }
    return;
  }
  reply_error("unexpected client frame");
}

void MockServer::Broadcast(const std::string& channel, std::string_view stream,
                           const wire::Frame& frame) {
  std::vector<std::shared_ptr<net::Connection>> targets;
  {
    std::lock_guard lock(mu_);
    for (const auto& s : subs_) {
      if (s.channel == channel && s.stream == stream) targets.push_back(s.conn);
    }
  }
  const std::string line = wire::Encode(frame);
  for (auto& t : targets) {
    try {
      t->WriteLine(line);
    } catch (const net::ConnectionClosed&) {
    }
  }
}

void MockServer::Unsubscribe(const std::shared_ptr<net::Connection>& conn) {
  std::lock_guard lock(mu_);
  std::erase_if(subs_, [&](const Subscription& s) { return s.conn == conn; });
}

}  // namespace modaudit
