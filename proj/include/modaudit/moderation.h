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

#ifndef MODAUDIT_MODERATION_H_
#define MODAUDIT_MODERATION_H_

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "modaudit/core.h"
#include "modaudit/lexicon.h"

namespace modaudit {

// Per-channel configuration of the reference simulator. Read-only while a
// session is running.
struct ChannelState {
  std::string channel;
  FilterConfig config;
  std::shared_ptr<const Lexicon> lexicon;
  // Match prefilter terms against whitespace-split raw text instead of
  // normalized tokens.
  bool prefilter_raw = false;
  CategoryMap categories = CategoryMap::Default();

  // Throws ConfigError / MappingError when the config is incomplete or a
  // lexicon category has no criterion.
  void Validate() const;
};

// Channel config JSON: {"channel", "active": [...], "levels": {...},
// "prefilter_raw": bool}. Levels of inactive criteria may be given and are
// ignored.
ChannelState LoadChannelConfig(const std::filesystem::path& path,
                               std::shared_ptr<const Lexicon> lexicon);
ChannelState ParseChannelConfig(std::string_view json, std::shared_ptr<const Lexicon> lexicon);

// The moderation pyramid: service-level prefilter first, then the channel's
// leveled category filters. Total and stateless per message.
Outcome moderate(std::string_view text, const ChannelState& state);

}  // namespace modaudit

#endif  // MODAUDIT_MODERATION_H_
