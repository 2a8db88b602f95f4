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

#ifndef MODAUDIT_LEXICON_H_
#define MODAUDIT_LEXICON_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "modaudit/core.h"

namespace modaudit {

// One simulator rule. Prefilter entries always block and ignore
// category/min_level; the others fire only when their category's criterion
// is active at a level >= min_level.
struct LexiconEntry {
  std::string term;
  std::optional<ModerationCategory> category;
  FilterLevel min_level{1};
  bool prefilter = false;
};

// Compiled, immutable rule set. Terms are tokenized with normalize() and
// matched on token boundaries only.
class Lexicon {
 public:
  // Throws ValidationError on empty terms, terms with no tokens, or
  // non-prefilter entries lacking a category or with min_level 0.
  explicit Lexicon(std::vector<LexiconEntry> entries);

  // JSON lines: {"term", "category", "min_level", "prefilter"}.
  static Lexicon ParseJsonl(std::istream& in);
  static Lexicon LoadJsonl(const std::filesystem::path& path);

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  const std::vector<std::string>& TermTokens(std::size_t entry) const { return term_tokens_[entry]; }
  const std::vector<std::string>& RawTermTokens(std::size_t entry) const {
    return raw_term_tokens_[entry];
  }

  // Entries whose first term token equals `token`, in load order.
  const std::vector<std::size_t>& EntriesStartingWith(const std::string& token) const;
  const std::vector<std::size_t>& RawEntriesStartingWith(const std::string& token) const;

 private:
  std::vector<LexiconEntry> entries_;
  std::vector<std::vector<std::string>> term_tokens_;
  std::vector<std::vector<std::string>> raw_term_tokens_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_token_;
  std::unordered_map<std::string, std::vector<std::size_t>> raw_by_first_token_;
};

// True iff `needle` occurs in `haystack` starting at `pos`.
bool MatchesAt(const std::vector<std::string>& haystack, std::size_t pos,
               const std::vector<std::string>& needle);

}  // namespace modaudit

#endif  // MODAUDIT_LEXICON_H_
