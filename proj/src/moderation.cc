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

#include "modaudit/moderation.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "modaudit/errors.h"
#include "modaudit/text.h"

namespace modaudit {
namespace {

bool PrefilterHit(std::string_view text, const TokenizedText& tok, const ChannelState& state) {
  const Lexicon& lex = *state.lexicon;
  if (state.prefilter_raw) {
    auto raw = SplitWhitespace(text);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      for (std::size_t e : lex.RawEntriesStartingWith(raw[i])) {
        if (lex.entries()[e].prefilter && MatchesAt(raw, i, lex.RawTermTokens(e))) return true;
      }
    }
    return false;
  }
  std::vector<std::string> words;
  words.reserve(tok.tokens.size());
  for (const auto& t : tok.tokens) words.push_back(t.text);
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t e : lex.EntriesStartingWith(words[i])) {
      if (lex.entries()[e].prefilter && MatchesAt(words, i, lex.TermTokens(e))) return true;
    }
  }
  return false;
}

bool Eligible(const LexiconEntry& e, const ChannelState& state) {
  if (e.prefilter || !e.category) return false;
  FilterCriterion crit = state.categories.CriterionFor(*e.category);
  if (!state.config.active.contains(crit)) return false;
  return state.config.EffectiveLevel(crit) >= e.min_level;
}

}  // namespace

void ChannelState::Validate() const {
  if (!lexicon) throw ConfigError("channel " + channel + " has no lexicon");
  config.Validate();
  for (const auto& e : lexicon->entries()) {
    if (!e.prefilter && e.category) categories.CriterionFor(*e.category);
  }
}

ChannelState ParseChannelConfig(std::string_view json, std::shared_ptr<const Lexicon> lexicon) {
  ChannelState state;
  try {
    auto j = nlohmann::json::parse(json);
    state.channel = j.at("channel").get<std::string>();
    for (const auto& name : j.value("active", nlohmann::json::array())) {
      state.config.active.insert(FilterCriterion::Parse(name.get<std::string>()));
    }
    const auto levels = j.value("levels", nlohmann::json::object());
    for (const auto& [name, level] : levels.items()) {
      state.config.levels[FilterCriterion::Parse(name)] = FilterLevel(level.get<int>());
    }
    state.prefilter_raw = j.value("prefilter_raw", false);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("channel config: ") + ex.what());
  }
  state.lexicon = std::move(lexicon);
  state.Validate();
  return state;
}

ChannelState LoadChannelConfig(const std::filesystem::path& path,
                               std::shared_ptr<const Lexicon> lexicon) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open channel config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseChannelConfig(ss.str(), std::move(lexicon));
}

Outcome moderate(std::string_view text, const ChannelState& state) {
  const Lexicon& lex = *state.lexicon;
  TokenizedText tok = Tokenize(text);
  if (PrefilterHit(text, tok, state)) return PreFiltered{};

  std::vector<std::string> words;
  words.reserve(tok.tokens.size());
  for (const auto& t : tok.tokens) words.push_back(t.text);

  // Earliest first match wins; candidates at one position are in load order.
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t e : lex.EntriesStartingWith(words[i])) {
      const LexiconEntry& entry = lex.entries()[e];
      const auto& needle = lex.TermTokens(e);
      if (!Eligible(entry, state) || !MatchesAt(words, i, needle)) continue;
      Moderated m{*entry.category, {}, entry.min_level};
      for (std::size_t k = i; k + needle.size() <= words.size();) {
        if (MatchesAt(words, k, needle)) {
          m.fragments.emplace_back(tok.Span(k, k + needle.size() - 1));
          k += needle.size();
        } else {
          ++k;
        }
      }
      return m;
    }
  }
  return Passed{};
}

}  // namespace modaudit
