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

#ifndef MODAUDIT_METRICS_H_
#define MODAUDIT_METRICS_H_

#include <compare>
#include <filesystem>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modaudit/core.h"
#include "modaudit/datasets.h"
#include "modaudit/reconciler.h"

namespace modaudit {

// Exact non-negative fraction, always in lowest terms. Denominator > 0.
class Rational {
 public:
  Rational() = default;
  Rational(std::uint64_t num, std::uint64_t den);

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  double ToDouble() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

// A rate that may be undefined; `reason` says why when it is.
struct MetricValue {
  std::optional<Rational> value;
  std::string reason;

  static MetricValue Of(std::uint64_t num, std::uint64_t den, std::string_view what);
  bool defined() const { return value.has_value(); }
  bool operator==(const MetricValue&) const = default;
};

// Harmonic mean of two defined rates. Absent if either is absent or both
// are zero.
MetricValue HarmonicMean(const MetricValue& a, const MetricValue& b, std::string_view what);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;
  // PreFiltered records, already included in tp/fp.
  std::uint64_t prefiltered_hate = 0;
  std::uint64_t prefiltered_benign = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

// A reconciled outcome joined with its ground truth.
struct ScoredRecord {
  std::string id;
  std::string text;
  Outcome outcome;
  Label label = Label::kBenign;
  std::vector<std::string> targets;
  // Stratification tags (criterion or community names); see TagGroups.
  std::vector<std::string> groups;
};

// Joins by id. Throws ScoringError listing every record whose id is missing
// from `corpus` or whose message has no label.
std::vector<ScoredRecord> JoinLabels(std::span<const OutcomeRecord> records,
                                     std::span<const Message> corpus);

// Tally of one record into `c`.
void Accumulate(ConfusionCounts& c, const Outcome& outcome, Label label);

ConfusionCounts confusion(std::span<const ScoredRecord> records);

struct RateReport {
  ConfusionCounts counts;
  MetricValue accuracy;
  MetricValue precision;
  MetricValue recall;
  MetricValue tnr;
  MetricValue f1_pr;
  MetricValue f1_tpr_tnr;
  // Pre-filtered share of the moderated hate records (tp). This is the Pf
  // column of the filter-wise tables, where Pf can exceed recall.
  MetricValue pf;
  // Pre-filtered share of all hate records.
  MetricValue pf_of_hate;
};

RateReport rates(const ConfusionCounts& c);

// (subset criterion, firing criterion) -> number of subset records moderated
// by that filter.
using FiringTally = std::map<std::pair<FilterCriterion, FilterCriterion>, std::uint64_t>;

// Adds the firings in one subset's records. Only Moderated outcomes carry a
// firing filter; PreFiltered and Passed records are ignored.
void TallyFirings(FiringTally& tally, const FilterCriterion& subset,
                  std::span<const ScoredRecord> records,
                  const CategoryMap& categories = CategoryMap::Default());

// P_F = tally(F, F) / sum over subsets j of tally(j, F), per firing filter.
std::map<FilterCriterion, MetricValue> filter_precision(const FiringTally& tally);

enum class Grouping { kCriterion, kCommunity };

// Fills ScoredRecord::groups from targets, in table order.
void TagGroups(std::span<ScoredRecord> records, const MappingTable& table, Grouping grouping);

struct GroupRecall {
  std::string group;
  ConfusionCounts counts;  // over the group's records, hate and benign
  MetricValue recall;
  MetricValue pf;
  MetricValue pf_of_hate;
};

struct StratifiedRecall {
  std::vector<GroupRecall> groups;  // first-seen order unless `order` given
  std::vector<std::string> omitted;  // groups without hate records
};

// Per-group recall over hate records. Groups with no hate records are listed
// in `omitted` rather than reported. When `order` is non-empty it fixes the
// output order and names groups that may have no records at all.
StratifiedRecall stratified_recall(std::span<const ScoredRecord> records,
                                   std::span<const std::string> order = {});

// Tokens of normalize() over PreFiltered texts minus stopwords, by
// descending frequency then lexicographically.
std::vector<std::pair<std::string, std::uint64_t>> prefiltered_unigrams(
    std::span<const OutcomeRecord> records, const std::set<std::string>& stopwords);

// One token per line; blank lines and lines starting with '#' are skipped.
std::set<std::string> LoadStopwords(const std::filesystem::path& path);

}  // namespace modaudit

#endif  // MODAUDIT_METRICS_H_
