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

#include "modaudit/lexicon.h"

#include <fstream>
#include <istream>

#include <json.hpp>

#include "modaudit/errors.h"
#include "modaudit/text.h"

namespace modaudit {

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  term_tokens_.reserve(entries_.size());
  raw_term_tokens_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.term.empty()) throw ValidationError("lexicon entry " + std::to_string(i) + ": empty term");
    auto tokens = normalize(e.term);
    if (tokens.empty()) {
      throw ValidationError("lexicon entry " + std::to_string(i) + ": term '" + e.term +
                            "' has no alphanumeric tokens");
    }
    if (!e.prefilter) {
      if (!e.category) {
        throw ValidationError("lexicon entry '" + e.term + "' needs a category");
      }
      if (e.min_level.value() < 1) {
        throw ValidationError("lexicon entry '" + e.term + "' needs min_level in [1, 4]");
      }
    }
    by_first_token_[tokens.front()].push_back(i);
    auto raw = SplitWhitespace(e.term);
    raw_by_first_token_[raw.front()].push_back(i);
    term_tokens_.push_back(std::move(tokens));
    raw_term_tokens_.push_back(std::move(raw));
  }
}

Lexicon Lexicon::ParseJsonl(std::istream& in) {
  std::vector<LexiconEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      LexiconEntry e;
      e.term = j.at("term").get<std::string>();
      e.prefilter = j.value("prefilter", false);
      if (j.contains("category") && !j["category"].is_null()) {
        e.category = ModerationCategory::Parse(j["category"].get<std::string>());
      }
      if (j.contains("min_level")) e.min_level = FilterLevel(j["min_level"].get<int>());
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError("lexicon line " + std::to_string(lineno) + ": " + ex.what());
    } catch (const Error& ex) {
      throw ValidationError("lexicon line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::LoadJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon " + path.string());
  return ParseJsonl(in);
}

const std::vector<std::size_t>& Lexicon::EntriesStartingWith(const std::string& token) const {
  static const std::vector<std::size_t> kNone;
  auto it = by_first_token_.find(token);
  return it == by_first_token_.end() ? kNone : it->second;
}

const std::vector<std::size_t>& Lexicon::RawEntriesStartingWith(const std::string& token) const {
  static const std::vector<std::size_t> kNone;
  auto it = raw_by_first_token_.find(token);
  return it == raw_by_first_token_.end() ? kNone : it->second;
}

bool MatchesAt(const std::vector<std::string>& haystack, std::size_t pos,
               const std::vector<std::string>& needle) {
  if (needle.empty() || pos + needle.size() > haystack.size()) return false;
  for (std::size_t k = 0; k < needle.size(); ++k) {
    if (haystack[pos + k] != needle[k]) return false;
  }
  return true;
}

}  // namespace modaudit
