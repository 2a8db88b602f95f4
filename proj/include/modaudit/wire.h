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

#ifndef MODAUDIT_WIRE_H_
#define MODAUDIT_WIRE_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace modaudit::wire {

// Line-delimited JSON frames. One frame per line, UTF-8, no embedded
// newlines (the JSON encoder escapes them).

// client -> server
struct SendFrame {
  std::string channel;
  std::string id;
  std::string text;
};

// client -> server; the server answers with SubscribedFrame once the
// connection receives frames of `stream` ("chat" or "automod").
struct SubscribeFrame {
  std::string channel;
  std::string stream;
};

// server -> client
struct SubscribedFrame {
  std::string channel;
  std::string stream;
};

struct ChatFrame {
  std::string channel;
  std::string id;
  std::string text;
};

struct EventFragment {
  std::string text;
  std::string category;
};

struct AutomodEventFrame {
  std::string channel;
  std::string id;
  std::string text;
  std::string category;
  std::vector<std::string> topics;
  std::vector<EventFragment> fragments;
  int level = 0;
};

struct ErrorFrame {
  std::string reason;
};

using Frame = std::variant<SendFrame, SubscribeFrame, SubscribedFrame, ChatFrame,
                           AutomodEventFrame, ErrorFrame>;

inline constexpr std::string_view kChatStream = "chat";
inline constexpr std::string_view kAutomodStream = "automod";

// Single line, without the trailing newline.
std::string Encode(const Frame& frame);

// Throws ProtocolError on malformed JSON, unknown type or missing fields.
Frame Decode(std::string_view line);

}  // namespace modaudit::wire

#endif  // MODAUDIT_WIRE_H_
