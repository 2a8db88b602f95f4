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

#ifndef MODAUDIT_CORE_H_
#define MODAUDIT_CORE_H_

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace modaudit {

// An abstract harm criterion that one filter enforces. The four built-ins
// cover the discrimination filters; other taxonomies use Custom().
class FilterCriterion {
 public:
  static FilterCriterion Disability() { return FilterCriterion("Disability"); }
  static FilterCriterion SSG() { return FilterCriterion("SSG"); }
  static FilterCriterion Misogyny() { return FilterCriterion("Misogyny"); }
  static FilterCriterion RER() { return FilterCriterion("RER"); }
  static const std::array<FilterCriterion, 4>& BuiltIns();

  // Returns the built-in with this name (case-insensitive) or a custom one.
  static FilterCriterion Parse(std::string_view name);

  const std::string& name() const { return name_; }
  bool is_builtin() const;

  auto operator<=>(const FilterCriterion&) const = default;

 private:
  explicit FilterCriterion(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

// Internal label reported by the moderation system alongside an event.
class ModerationCategory {
 public:
  static ModerationCategory Ableism() { return ModerationCategory("Ableism"); }
  static ModerationCategory Misogyny() { return ModerationCategory("Misogyny"); }
  static ModerationCategory Racism() { return ModerationCategory("Racism"); }
  static ModerationCategory Homophobia() { return ModerationCategory("Homophobia"); }
  static const std::array<ModerationCategory, 4>& BuiltIns();

  static ModerationCategory Parse(std::string_view name);

  const std::string& name() const { return name_; }
  bool is_builtin() const;

  auto operator<=>(const ModerationCategory&) const = default;

 private:
  explicit ModerationCategory(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

// Strictness of one filter: 0 disables it, 4 is maximum filtering.
class FilterLevel {
 public:
  static constexpr int kMin = 0;
  static constexpr int kMax = 4;

  constexpr FilterLevel() = default;
  // Throws ConfigError outside [0, 4].
  explicit FilterLevel(int value);

  constexpr int value() const { return value_; }
  auto operator<=>(const FilterLevel&) const = default;

 private:
  int value_ = 0;
};

struct FilterConfig {
  std::set<FilterCriterion> active;
  std::map<FilterCriterion, FilterLevel> levels;

  // Every built-in active at the given level.
  static FilterConfig AllBuiltIns(FilterLevel level);

  // Throws ConfigError if an active criterion has no level.
  void Validate() const;
  // Level 0 for criteria that are not active.
  FilterLevel EffectiveLevel(const FilterCriterion& c) const;
};

// Injective ModerationCategory -> FilterCriterion map. The default instance
// holds the built-in pairs; custom pairs may be registered on a copy.
class CategoryMap {
 public:
  CategoryMap();
  static const CategoryMap& Default();

  // Throws MappingError if the criterion is already the image of another
  // category (the map must stay injective) or the category is already bound.
  void Register(const ModerationCategory& cat, const FilterCriterion& crit);

  // Throws MappingError for categories without a registered mapping.
  FilterCriterion CriterionFor(const ModerationCategory& cat) const;
  std::optional<ModerationCategory> CategoryFor(const FilterCriterion& crit) const;

 private:
  std::map<ModerationCategory, FilterCriterion> forward_;
};

FilterCriterion category_to_criterion(const ModerationCategory& cat);

enum class Label { kBenign, kHate };

struct Message {
  std::string id;
  std::string text;
  std::optional<Label> label;
  std::vector<std::string> targets;
  std::string source;
};

struct Passed {
  bool operator==(const Passed&) const = default;
};
struct PreFiltered {
  bool operator==(const PreFiltered&) const = default;
};
struct Moderated {
  ModerationCategory category;
  std::vector<std::string> fragments;
  FilterLevel level;
  bool operator==(const Moderated&) const = default;
};

using Outcome = std::variant<Passed, Moderated, PreFiltered>;

enum class OutcomeKind { kPassed, kModerated, kPreFiltered };

OutcomeKind KindOf(const Outcome& o);
std::string_view ToString(OutcomeKind k);
OutcomeKind ParseOutcomeKind(std::string_view s);

// True for Moderated and PreFiltered: both keep the message out of chat.
inline bool IsBlocked(const Outcome& o) {
  return !std::holds_alternative<Passed>(o);
}

// Union semantics of the active moderation function: true iff some active
// criterion fired. Throws ConfigError when an active criterion is missing
// from per_criterion.
bool active_decision(const std::map<FilterCriterion, bool>& per_criterion,
                     const FilterConfig& config);

}  // namespace modaudit

#endif  // MODAUDIT_CORE_H_
