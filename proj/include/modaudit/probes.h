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

#ifndef MODAUDIT_PROBES_H_
#define MODAUDIT_PROBES_H_

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modaudit/core.h"

namespace modaudit {

// Ordered (group term -> replacement) pairs. Matching is case-insensitive on
// word boundaries; longer terms win. No replacements ship with the project.
struct SlurMap {
  std::vector<std::pair<std::string, std::string>> pairs;

  // JSON: [["term", "replacement"], ...] or [{"term":..,"replacement":..}].
  // Throws ValidationError on empty terms.
  static SlurMap Parse(std::string_view json);
  static SlurMap Load(const std::filesystem::path& path);
};

// Single left-to-right pass replacing every word-boundary occurrence of a
// mapped term, longest match first. Replacements are not re-scanned and all
// other bytes are copied unchanged.
std::string counterfactual(std::string_view text, const SlurMap& map);

enum class PerturbMethod {
  kPunctuation,
  kSpaces,
  kPartialObfuscation,
  kPhoneticPlay,
  kReversedLetters,
  kCombination,
};

std::string_view ToString(PerturbMethod m);

// Deterministic rewrite of one token (positions count code points):
//   Punctuation         "." after char 1, space after char 3   bitch -> b.it ch
//   Spaces              space after char 3                     bitch -> bit ch
//   PartialObfuscation  chars 2-3 become "***"                 bitch -> b***ch
//   PhoneticPlay        char at len-3 doubled                  bitch -> bittch
//   ReversedLetters     full reverse                           bitches -> sehctib
//   Combination         Punctuation on fragment + "es"         bitch -> b.it ches
// Throws GenerationError for tokens shorter than 3 (2 for ReversedLetters)
// or containing whitespace.
std::string perturb(std::string_view fragment, PerturbMethod method);

struct PerturbVariant {
  std::string method;  // "Unperturbed" or a PerturbMethod name
  std::string text;
};

// Unperturbed plus the six methods, in moderation-rate table order:
// Unperturbed, PhoneticPlay, Spaces, Punctuation, Combination,
// PartialObfuscation, ReversedLetters. ReversedLetters is applied to the
// plural (fragment + "es"), as Combination is.
std::vector<PerturbVariant> perturbation_suite(std::string_view fragment);

// Policy-adherence probe set: JSONL of {"text", "expected": "pass"}. Each
// probe becomes a benign Message with id "<source>:<line>".
std::vector<Message> LoadProbeSet(const std::filesystem::path& path,
                                  const std::string& source = "policy-probes");

}  // namespace modaudit

#endif  // MODAUDIT_PROBES_H_
