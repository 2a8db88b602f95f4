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

#include <gtest/gtest.h>

#include <random>

#include "modaudit/errors.h"

namespace modaudit {
namespace {

const FilterCriterion kDis = FilterCriterion::Disability();
const FilterCriterion kSsg = FilterCriterion::SSG();
const FilterCriterion kMis = FilterCriterion::Misogyny();
const FilterCriterion kRer = FilterCriterion::RER();

FilterConfig Active(std::set<FilterCriterion> active) {
  FilterConfig fc;
  for (const auto& c : active) fc.levels[c] = FilterLevel(4);
  fc.active = std::move(active);
  return fc;
}

TEST(ActiveDecision, UnionOfActiveFilters) {
  EXPECT_TRUE(active_decision({{kMis, true}, {kRer, false}}, Active({kMis, kRer})));
}

TEST(ActiveDecision, EmptyActiveSetNeverFires) {
  EXPECT_FALSE(active_decision({{kMis, true}}, Active({})));
}

TEST(ActiveDecision, AllZero) {
  EXPECT_FALSE(active_decision({{kDis, false}, {kSsg, false}, {kMis, false}, {kRer, false}},
                               Active({kDis, kSsg, kMis, kRer})));
}

TEST(ActiveDecision, InactiveFiringIgnored) {
  EXPECT_FALSE(active_decision({{kMis, true}, {kRer, false}}, Active({kRer})));
}

TEST(ActiveDecision, MissingActiveEntryIsConfigError) {
  EXPECT_THROW(active_decision({{kMis, true}}, Active({kMis, kRer})), ConfigError);
}

TEST(ActiveDecision, MonotoneInActiveSet) {
  std::mt19937 rng(3);
  const auto& all = FilterCriterion::BuiltIns();
  for (int trial = 0; trial < 500; ++trial) {
    std::map<FilterCriterion, bool> fired;
    for (const auto& c : all) fired[c] = rng() % 2;
    std::set<FilterCriterion> small, large;
    for (const auto& c : all) {
      const int r = rng() % 3;
      if (r == 0) small.insert(c);
      if (r <= 1) large.insert(c);
    }
    if (active_decision(fired, Active(small))) {
      EXPECT_TRUE(active_decision(fired, Active(large)));
    }
  }
}

TEST(CategoryMap, BuiltInPairs) {
  EXPECT_EQ(category_to_criterion(ModerationCategory::Ableism()), kDis);
  EXPECT_EQ(category_to_criterion(ModerationCategory::Racism()), kRer);
  EXPECT_EQ(category_to_criterion(ModerationCategory::Homophobia()), kSsg);
  EXPECT_EQ(category_to_criterion(ModerationCategory::Misogyny()), kMis);
}

TEST(CategoryMap, InjectiveOnBuiltIns) {
  std::set<FilterCriterion> images;
  for (const auto& cat : ModerationCategory::BuiltIns()) images.insert(category_to_criterion(cat));
  EXPECT_EQ(images.size(), ModerationCategory::BuiltIns().size());
}

TEST(CategoryMap, UnknownCategoryIsMappingError) {
  EXPECT_THROW(category_to_criterion(ModerationCategory::Parse("Spam")), MappingError);
}

TEST(CategoryMap, CustomRegistration) {
  CategoryMap m;
  m.Register(ModerationCategory::Parse("Spam"), FilterCriterion::Parse("Commerce"));
  EXPECT_EQ(m.CriterionFor(ModerationCategory::Parse("Spam")).name(), "Commerce");
  EXPECT_EQ(m.CategoryFor(FilterCriterion::Parse("Commerce"))->name(), "Spam");
  // A second category onto the same criterion breaks injectivity.
  EXPECT_THROW(m.Register(ModerationCategory::Parse("Scam"), FilterCriterion::Parse("Commerce")),
               MappingError);
  EXPECT_THROW(m.Register(ModerationCategory::Parse("Spam"), FilterCriterion::Parse("Other")),
               MappingError);
  EXPECT_THROW(m.Register(ModerationCategory::Parse("Slurs"), kRer), MappingError);
}

TEST(Names, ParseIsCaseInsensitiveForBuiltIns) {
  EXPECT_EQ(FilterCriterion::Parse("rer"), kRer);
  EXPECT_EQ(FilterCriterion::Parse("ssg"), kSsg);
  EXPECT_TRUE(FilterCriterion::Parse("Disability").is_builtin());
  EXPECT_FALSE(FilterCriterion::Parse("Commerce").is_builtin());
  EXPECT_EQ(ModerationCategory::Parse("racism"), ModerationCategory::Racism());
}

TEST(FilterLevel, Range) {
  EXPECT_EQ(FilterLevel(0).value(), 0);
  EXPECT_EQ(FilterLevel(4).value(), 4);
  EXPECT_THROW(FilterLevel(-1), ConfigError);
  EXPECT_THROW(FilterLevel(5), ConfigError);
}

TEST(FilterConfig, ValidateAndEffectiveLevel) {
  FilterConfig fc;
  fc.active = {kMis};
  EXPECT_THROW(fc.Validate(), ConfigError);
  fc.levels[kMis] = FilterLevel(2);
  fc.levels[kRer] = FilterLevel(3);
  EXPECT_NO_THROW(fc.Validate());
  EXPECT_EQ(fc.EffectiveLevel(kMis).value(), 2);
  EXPECT_EQ(fc.EffectiveLevel(kRer).value(), 0);  // inactive
  EXPECT_NO_THROW(FilterConfig{}.Validate());     // empty active set is legal
}

TEST(Outcome, KindPartition) {
  const std::vector<Outcome> all = {Passed{}, Moderated{ModerationCategory::Racism(), {"x"}, FilterLevel(1)},
                                    PreFiltered{}};
  std::set<OutcomeKind> kinds;
  for (const auto& o : all) {
    kinds.insert(KindOf(o));
    EXPECT_EQ(ParseOutcomeKind(ToString(KindOf(o))), KindOf(o));
  }
  EXPECT_EQ(kinds.size(), 3u);
  EXPECT_FALSE(IsBlocked(all[0]));
  EXPECT_TRUE(IsBlocked(all[1]));
  EXPECT_TRUE(IsBlocked(all[2]));
}

}  // namespace
}  // namespace modaudit
