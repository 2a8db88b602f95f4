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

#include "modaudit/wire.h"

#include <json.hpp>

#include "modaudit/errors.h"

namespace modaudit::wire {
namespace {

using nlohmann::json;

std::string Str(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw ProtocolError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

struct Encoder {
  json operator()(const SendFrame& f) const {
    return {{"type", "send"}, {"channel", f.channel}, {"id", f.id}, {"text", f.text}};
  }
  json operator()(const SubscribeFrame& f) const {
    return {{"type", "subscribe"}, {"channel", f.channel}, {"stream", f.stream}};
  }
  json operator()(const SubscribedFrame& f) const {
    return {{"type", "subscribed"}, {"channel", f.channel}, {"stream", f.stream}};
  }
  json operator()(const ChatFrame& f) const {
    return {{"type", "chat"}, {"channel", f.channel}, {"id", f.id}, {"text", f.text}};
  }
  json operator()(const AutomodEventFrame& f) const {
    json frags = json::array();
    for (const auto& fr : f.fragments) frags.push_back({{"text", fr.text}, {"category", fr.category}});
    return {{"type", "automod_event"}, {"channel", f.channel}, {"id", f.id},
            {"text", f.text},          {"category", f.category}, {"topics", f.topics},
            {"fragments", frags},      {"level", f.level}};
  }
  json operator()(const ErrorFrame& f) const { return {{"type", "error"}, {"reason", f.reason}}; }
};

}  // namespace

std::string Encode(const Frame& frame) {
  return std::visit(Encoder{}, frame).dump(-1, ' ', false, json::error_handler_t::replace);
}

Frame Decode(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ProtocolError("malformed JSON frame");
  if (!j.is_object()) throw ProtocolError("frame must be a JSON object");
  const std::string type = Str(j, "type");
  if (type == "send") return SendFrame{Str(j, "channel"), Str(j, "id"), Str(j, "text")};
  if (type == "subscribe") return SubscribeFrame{Str(j, "channel"), Str(j, "stream")};
  if (type == "subscribed") return SubscribedFrame{Str(j, "channel"), Str(j, "stream")};
  if (type == "chat") return ChatFrame{Str(j, "channel"), j.value("id", ""), Str(j, "text")};
  if (type == "error") return ErrorFrame{Str(j, "reason")};
  if (type == "automod_event") {
    AutomodEventFrame f;
    f.channel = Str(j, "channel");
    f.id = j.value("id", "");
    f.text = Str(j, "text");
    f.category = Str(j, "category");
    try {
      f.topics = j.value("topics", std::vector<std::string>{});
      for (const auto& fr : j.value("fragments", json::array())) {
        f.fragments.push_back({Str(fr, "text"), fr.value("category", f.category)});
      }
      f.level = j.value("level", 0);
    } catch (const json::exception& ex) {
      throw ProtocolError(std::string("bad automod_event: ") + ex.what());
    }
    return f;
  }
  throw ProtocolError("unknown frame type '" + type + "'");
}

}  // namespace modaudit::wire
