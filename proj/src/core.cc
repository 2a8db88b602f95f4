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

#include "modaudit/core.h"

#include <algorithm>
#include <cctype>

#include "modaudit/errors.h"

namespace modaudit {
namespace {

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

const std::array<FilterCriterion, 4>& FilterCriterion::BuiltIns() {
  static const std::array<FilterCriterion, 4> kAll = {Disability(), SSG(), Misogyny(), RER()};
  return kAll;
}

FilterCriterion FilterCriterion::Parse(std::string_view name) {
  for (const auto& c : BuiltIns()) {
    if (EqualsIgnoreCase(c.name(), name)) return c;
  }
  if (name.empty()) throw ConfigError("empty filter criterion name");
  return FilterCriterion(std::string(name));
}

bool FilterCriterion::is_builtin() const {
  const auto& all = BuiltIns();
  return std::find(all.begin(), all.end(), *this) != all.end();
}

const std::array<ModerationCategory, 4>& ModerationCategory::BuiltIns() {
  static const std::array<ModerationCategory, 4> kAll = {Ableism(), Misogyny(), Racism(),
                                                         Homophobia()};
  return kAll;
}

ModerationCategory ModerationCategory::Parse(std::string_view name) {
  for (const auto& c : BuiltIns()) {
    if (EqualsIgnoreCase(c.name(), name)) return c;
  }
  if (name.empty()) throw MappingError("empty moderation category name");
  return ModerationCategory(std::string(name));
}

bool ModerationCategory::is_builtin() const {
  const auto& all = BuiltIns();
  return std::find(all.begin(), all.end(), *this) != all.end();
}

FilterLevel::FilterLevel(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw ConfigError("filter level " + std::to_string(value) + " outside [0, 4]");
  }
}

FilterConfig FilterConfig::AllBuiltIns(FilterLevel level) {
  FilterConfig cfg;
  for (const auto& c : FilterCriterion::BuiltIns()) {
    cfg.active.insert(c);
    cfg.levels[c] = level;
  }
  return cfg;
}

void FilterConfig::Validate() const {
  for (const auto& c : active) {
    if (!levels.contains(c)) {
      throw ConfigError("active criterion " + c.name() + " has no level");
    }
  }
}

FilterLevel FilterConfig::EffectiveLevel(const FilterCriterion& c) const {
  if (!active.contains(c)) return FilterLevel(0);
  auto it = levels.find(c);
  return it == levels.end() ? FilterLevel(0) : it->second;
}

CategoryMap::CategoryMap() {
  forward_.emplace(ModerationCategory::Ableism(), FilterCriterion::Disability());
  forward_.emplace(ModerationCategory::Misogyny(), FilterCriterion::Misogyny());
  forward_.emplace(ModerationCategory::Racism(), FilterCriterion::RER());
  forward_.emplace(ModerationCategory::Homophobia(), FilterCriterion::SSG());
}

const CategoryMap& CategoryMap::Default() {
  static const CategoryMap kDefault;
  return kDefault;
}

void CategoryMap::Register(const ModerationCategory& cat, const FilterCriterion& crit) {
  if (forward_.contains(cat)) {
    throw MappingError("category " + cat.name() + " is already mapped");
  }
  for (const auto& [other, target] : forward_) {
    if (target == crit) {
      throw MappingError("criterion " + crit.name() + " is already the image of " +
                         other.name());
    }
  }
  forward_.emplace(cat, crit);
}

FilterCriterion CategoryMap::CriterionFor(const ModerationCategory& cat) const {
  auto it = forward_.find(cat);
  if (it == forward_.end()) {
    throw MappingError("no criterion registered for category " + cat.name());
  }
  return it->second;
}

std::optional<ModerationCategory> CategoryMap::CategoryFor(const FilterCriterion& crit) const {
  for (const auto& [cat, target] : forward_) {
    if (target == crit) return cat;
  }
  return std::nullopt;
}

FilterCriterion category_to_criterion(const ModerationCategory& cat) {
  return CategoryMap::Default().CriterionFor(cat);
}

OutcomeKind KindOf(const Outcome& o) {
  switch (o.index()) {
    case 0:
      return OutcomeKind::kPassed;
    case 1:
      return OutcomeKind::kModerated;
    default:
      return OutcomeKind::kPreFiltered;
  }
}

std::string_view ToString(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::kPassed:
      return "passed";
    case OutcomeKind::kModerated:
      return "moderated";
    case OutcomeKind::kPreFiltered:
      return "prefiltered";
  }
  return "unknown";
}

OutcomeKind ParseOutcomeKind(std::string_view s) {
  if (s == "passed") return OutcomeKind::kPassed;
  if (s == "moderated") return OutcomeKind::kModerated;
  if (s == "prefiltered") return OutcomeKind::kPreFiltered;
  throw ValidationError("unknown outcome kind: " + std::string(s));
}

bool active_decision(const std::map<FilterCriterion, bool>& per_criterion,
                     const FilterConfig& config) {
  bool fired = false;
  for (const auto& c : config.active) {
    auto it = per_criterion.find(c);
    if (it == per_criterion.end()) {
      throw ConfigError("no decision supplied for active criterion " + c.name());
    }
    fired = fired || it->second;
  }
  return fired;
}

}  // namespace modaudit
