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

#include "modaudit/metrics.h"

#include <gtest/gtest.h>

#include <random>

#include "modaudit/errors.h"
#include "oracle.h"

namespace modaudit {
namespace {

Moderated Mod(const ModerationCategory& c) { return Moderated{c, {"x"}, FilterLevel(1)}; }

ScoredRecord Rec(std::string id, Outcome o, Label l, std::vector<std::string> groups = {}) {
  ScoredRecord r;
  r.id = std::move(id);
  r.outcome = std::move(o);
  r.label = l;
  r.groups = std::move(groups);
  return r;
}

ConfusionCounts Counts(const oracle::Counts& c) {
  ConfusionCounts out;
  out.tp = c.tp;
  out.fp = c.fp;
  out.tn = c.tn;
  out.fn = c.fn;
  return out;
}

double D(const MetricValue& v) { return v.value->ToDouble(); }

TEST(Rational, LowestTerms) {
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  EXPECT_EQ(Rational(0, 7), Rational(0, 1));
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_THROW(Rational(1, 0), ScoringError);
}

TEST(Confusion, HandCount) {
  std::vector<ScoredRecord> rs;
  const auto m = Mod(ModerationCategory::Racism());
  for (int i = 0; i < 2; ++i) rs.push_back(Rec("h" + std::to_string(i), m, Label::kHate));
  for (int i = 0; i < 3; ++i) rs.push_back(Rec("p" + std::to_string(i), Passed{}, Label::kHate));
  for (int i = 0; i < 4; ++i) rs.push_back(Rec("b" + std::to_string(i), Passed{}, Label::kBenign));
  rs.push_back(Rec("f", m, Label::kBenign));
  auto c = confusion(rs);
  EXPECT_EQ(c.tp, 2u);
  EXPECT_EQ(c.fn, 3u);
  EXPECT_EQ(c.tn, 4u);
  EXPECT_EQ(c.fp, 1u);
}

TEST(Confusion, AllBenignPassed) {
  std::vector<ScoredRecord> rs(5, Rec("x", Passed{}, Label::kBenign));
  EXPECT_EQ(confusion(rs), (ConfusionCounts{0, 0, 5, 0, 0, 0}));
}

TEST(Confusion, PrefilteredCountsAsModerated) {
  std::vector<ScoredRecord> rs = {Rec("x", PreFiltered{}, Label::kHate)};
  auto c = confusion(rs);
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.prefiltered_hate, 1u);
  auto r = rates(c);
  EXPECT_EQ(*r.pf.value, Rational(1, 1));
  EXPECT_EQ(*r.pf_of_hate.value, Rational(1, 1));
}

TEST(Rates, ReferenceF1Values) {
  // SBIC row: P=0.42 R=0.19 TNR=0.91.
  auto r = rates(Counts(oracle::FromPercent(42, 19, 91)));
  EXPECT_EQ(*r.precision.value, Rational(42, 100));
  EXPECT_EQ(*r.recall.value, Rational(19, 100));
  EXPECT_EQ(*r.tnr.value, Rational(91, 100));
  EXPECT_NEAR(D(r.f1_pr), 0.26, 0.005);
  EXPECT_NEAR(D(r.f1_tpr_tnr), 0.31, 0.005);
  EXPECT_NEAR(D(r.f1_pr), oracle::Harmonic(0.42, 0.19), 1e-12);
}

TEST(Rates, PerfectClassifier) {
  auto r = rates(ConfusionCounts{5, 0, 5, 0, 0, 0});
  EXPECT_EQ(*r.f1_tpr_tnr.value, Rational(1, 1));
  EXPECT_EQ(*r.f1_pr.value, Rational(1, 1));
  EXPECT_EQ(*r.accuracy.value, Rational(1, 1));
}

TEST(Rates, UndefinedAreAbsent) {
  auto r = rates(ConfusionCounts{0, 0, 3, 0, 0, 0});
  EXPECT_FALSE(r.precision.defined());
  EXPECT_FALSE(r.recall.defined());
  EXPECT_FALSE(r.f1_pr.defined());
  EXPECT_FALSE(r.precision.reason.empty());
  EXPECT_EQ(*r.tnr.value, Rational(1, 1));
  auto e = rates(ConfusionCounts{});
  EXPECT_FALSE(e.accuracy.defined());
}

TEST(Rates, ZeroHarmonicMeanIsAbsent) {
  auto r = rates(ConfusionCounts{0, 3, 0, 2, 0, 0});
  EXPECT_EQ(*r.precision.value, Rational(0, 1));
  EXPECT_FALSE(r.f1_pr.defined());
}

TEST(Rates, SandwichAndOracle) {
  std::mt19937 rng(1);
  for (int i = 0; i < 2000; ++i) {
    ConfusionCounts c{rng() % 50, rng() % 50, rng() % 50, rng() % 50, 0, 0};
    auto r = rates(c);
    if (r.f1_pr.defined()) {
      const auto lo = std::min(*r.precision.value, *r.recall.value);
      const auto hi = std::max(*r.precision.value, *r.recall.value);
      EXPECT_LE(lo, *r.f1_pr.value);
      EXPECT_LE(*r.f1_pr.value, hi);
      // 2PR/(P+R) with P=tp/(tp+fp), R=tp/(tp+fn) is 2tp/(2tp+fp+fn).
      EXPECT_EQ(*r.f1_pr.value, Rational(2 * c.tp, 2 * c.tp + c.fp + c.fn));
    }
    if (r.f1_tpr_tnr.defined()) {
      const auto lo = std::min(*r.recall.value, *r.tnr.value);
      const auto hi = std::max(*r.recall.value, *r.tnr.value);
      EXPECT_LE(lo, *r.f1_tpr_tnr.value);
      EXPECT_LE(*r.f1_tpr_tnr.value, hi);
    }
    if (c.total() > 0) {
      EXPECT_EQ(*r.accuracy.value, Rational(c.tp + c.tn, c.total()));
    }
  }
}

TEST(Rates, BenignAugmentationKeepsRecall) {
  std::mt19937 rng(2);
  const auto m = Mod(ModerationCategory::Misogyny());
  for (int i = 0; i < 100; ++i) {
    std::vector<ScoredRecord> rs;
    for (int k = 0; k < 20; ++k) {
      const bool hate = rng() % 2;
      const int o = rng() % 3;
      Outcome out = o == 0 ? Outcome(Passed{}) : o == 1 ? Outcome(m) : Outcome(PreFiltered{});
      rs.push_back(Rec(std::to_string(k), out, hate ? Label::kHate : Label::kBenign));
    }
    const auto before = rates(confusion(rs));
    for (int k = 0; k < 1 + static_cast<int>(rng() % 10); ++k) {
      rs.push_back(Rec("b" + std::to_string(k), Passed{}, Label::kBenign));
    }
    const auto after = rates(confusion(rs));
    EXPECT_EQ(before.recall, after.recall);
    EXPECT_EQ(before.pf, after.pf);
  }
}

TEST(Confusion, MatchesNaiveOracle) {
  std::mt19937 rng(4);
  const auto m = Mod(ModerationCategory::Homophobia());
  for (int i = 0; i < 200; ++i) {
    std::vector<OutcomeRecord> records;
    std::vector<Message> corpus;
    std::vector<std::pair<std::string, bool>> labels;
    std::vector<std::pair<std::string, std::string>> verdicts;
    const int n = rng() % 40;
    for (int k = 0; k < n; ++k) {
      const std::string id = "m" + std::to_string(k);
      const bool hate = rng() % 2;
      const int o = rng() % 3;
      Outcome out = o == 0 ? Outcome(Passed{}) : o == 1 ? Outcome(m) : Outcome(PreFiltered{});
      records.push_back({id, "t", out, std::nullopt, "r"});
      corpus.push_back({id, "t", hate ? Label::kHate : Label::kBenign, {}, "s"});
      labels.emplace_back(id, hate);
      verdicts.emplace_back(id, std::string(ToString(KindOf(out))));
    }
    std::shuffle(corpus.begin(), corpus.end(), rng);
    const auto got = confusion(JoinLabels(records, corpus));
    const auto want = oracle::Confusion(labels, verdicts);
    EXPECT_EQ(got.tp, static_cast<std::uint64_t>(want.tp));
    EXPECT_EQ(got.fp, static_cast<std::uint64_t>(want.fp));
    EXPECT_EQ(got.tn, static_cast<std::uint64_t>(want.tn));
    EXPECT_EQ(got.fn, static_cast<std::uint64_t>(want.fn));
    EXPECT_EQ(got.prefiltered_hate, static_cast<std::uint64_t>(want.pre_hate));
  }
}

TEST(JoinLabels, ReportsMissingIds) {
  std::vector<OutcomeRecord> records = {{"a", "t", Passed{}, std::nullopt, ""},
                                        {"b", "t", Passed{}, std::nullopt, ""},
                                        {"c", "t", Passed{}, std::nullopt, ""}};
  std::vector<Message> corpus = {{"a", "t", Label::kHate, {}, ""}, {"b", "t", std::nullopt, {}, ""}};
  try {
    JoinLabels(records, corpus);
    FAIL();
  } catch (const ScoringError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("b"), std::string::npos);
    EXPECT_NE(what.find("c"), std::string::npos);
  }
}

TEST(FilterPrecision, HandExample) {
  FiringTally t;
  const auto mis = FilterCriterion::Misogyny();
  t[{mis, mis}] = 3;
  t[{FilterCriterion::RER(), mis}] = 1;
  t[{FilterCriterion::SSG(), mis}] = 1;
  t[{FilterCriterion::RER(), FilterCriterion::RER()}] = 4;
  auto p = filter_precision(t);
  EXPECT_EQ(*p.at(mis).value, Rational(3, 5));
  EXPECT_EQ(*p.at(FilterCriterion::RER()).value, Rational(1, 1));
}

TEST(FilterPrecision, TallyFromRecords) {
  FiringTally t;
  std::vector<ScoredRecord> rs = {
      Rec("1", Mod(ModerationCategory::Misogyny()), Label::kHate),
      Rec("2", Mod(ModerationCategory::Racism()), Label::kHate),
      Rec("3", PreFiltered{}, Label::kHate),
      Rec("4", Passed{}, Label::kHate),
  };
  TallyFirings(t, FilterCriterion::Misogyny(), rs);
  EXPECT_EQ((t[{FilterCriterion::Misogyny(), FilterCriterion::Misogyny()}]), 1u);
  EXPECT_EQ((t[{FilterCriterion::Misogyny(), FilterCriterion::RER()}]), 1u);
  std::uint64_t sum = 0;
  for (const auto& [k, v] : t) sum += v;
  EXPECT_EQ(sum, 2u);
  // A filter that never fires has no precision.
  auto p = filter_precision(t);
  EXPECT_FALSE(p.contains(FilterCriterion::SSG()) && p.at(FilterCriterion::SSG()).defined());
}

TEST(StratifiedRecall, GroupsAndOmissions) {
  const auto m = Mod(ModerationCategory::Racism());
  std::vector<ScoredRecord> rs = {
      Rec("1", PreFiltered{}, Label::kHate, {"A"}),
      Rec("2", PreFiltered{}, Label::kHate, {"A"}),
      Rec("3", m, Label::kHate, {"B"}),
      Rec("4", Passed{}, Label::kHate, {"B"}),
      Rec("5", Passed{}, Label::kBenign, {"C"}),
  };
  auto s = stratified_recall(rs);
  ASSERT_EQ(s.groups.size(), 2u);
  EXPECT_EQ(s.groups[0].group, "A");
  EXPECT_EQ(*s.groups[0].recall.value, Rational(1, 1));
  EXPECT_EQ(*s.groups[0].pf_of_hate.value, Rational(1, 1));
  EXPECT_EQ(*s.groups[1].recall.value, Rational(1, 2));
  EXPECT_EQ(*s.groups[1].pf.value, Rational(0, 1));
  EXPECT_EQ(s.omitted, std::vector<std::string>{"C"});

  std::vector<ScoredRecord> one = {Rec("1", m, Label::kHate, {"only"})};
  EXPECT_EQ(stratified_recall(one).groups.size(), 1u);

  const std::vector<std::string> order = {"B", "Z", "A"};
  auto ordered = stratified_recall(rs, order);
  ASSERT_EQ(ordered.groups.size(), 2u);
  EXPECT_EQ(ordered.groups[0].group, "B");
  EXPECT_NE(std::find(ordered.omitted.begin(), ordered.omitted.end(), "Z"), ordered.omitted.end());
}

TEST(TagGroups, FromMapping) {
  auto table = MappingTable::Parse(R"({
    "standardization": {"Blue Folks": ["blue people"], "Women": ["women"]},
    "filters": {"RER": ["Blue Folks"], "Misogyny": ["Women"]},
    "communities": {"Blue Folks": ["Blue Folks"]}})");
  std::vector<ScoredRecord> rs = {Rec("1", Passed{}, Label::kHate), Rec("2", Passed{}, Label::kHate)};
  rs[0].targets = {"women", "blue people"};
  rs[1].targets = {"martians"};
  TagGroups(rs, table, Grouping::kCriterion);
  EXPECT_EQ(rs[0].groups, (std::vector<std::string>{"RER", "Misogyny"}));
  EXPECT_TRUE(rs[1].groups.empty());
  TagGroups(rs, table, Grouping::kCommunity);
  EXPECT_EQ(rs[0].groups, std::vector<std::string>{"Blue Folks"});
}

TEST(Unigrams, HandCount) {
  std::vector<OutcomeRecord> rs = {{"1", "a b b", PreFiltered{}, std::nullopt, ""},
                                   {"2", "b c", PreFiltered{}, std::nullopt, ""},
                                   {"3", "c c c c", Passed{}, std::nullopt, ""},
                                   {"4", "a", PreFiltered{}, std::nullopt, ""}};
  auto u = prefiltered_unigrams(rs, {"a"});
  EXPECT_EQ(u, (std::vector<std::pair<std::string, std::uint64_t>>{{"b", 3}, {"c", 1}}));
  std::vector<OutcomeRecord> none = {{"1", "x", Passed{}, std::nullopt, ""}};
  EXPECT_TRUE(prefiltered_unigrams(none, {}).empty());
}

TEST(Unigrams, TiesAreLexicographic) {
  std::vector<OutcomeRecord> rs = {{"1", "Zeta alpha beta", PreFiltered{}, std::nullopt, ""}};
  auto u = prefiltered_unigrams(rs, {});
  ASSERT_EQ(u.size(), 3u);
  EXPECT_EQ(u[0].first, "alpha");
  EXPECT_EQ(u[2].first, "zeta");
}

}  // namespace
}  // namespace modaudit
