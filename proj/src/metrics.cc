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

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "modaudit/errors.h"
#include "modaudit/text.h"

namespace modaudit {

Rational::Rational(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
  if (den == 0) throw ScoringError("rational with zero denominator");
  const std::uint64_t g = std::gcd(num, den);
  num_ /= g;
  den_ /= g;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  // Cross-multiply in 128 bits to stay exact.
  const auto l = static_cast<unsigned __int128>(a.num_) * b.den_;
  const auto r = static_cast<unsigned __int128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

MetricValue MetricValue::Of(std::uint64_t num, std::uint64_t den, std::string_view what) {
  MetricValue v;
  if (den == 0) {
    v.reason = std::string(what) + " undefined: zero denominator";
  } else {
    v.value = Rational(num, den);
  }
  return v;
}

MetricValue HarmonicMean(const MetricValue& a, const MetricValue& b, std::string_view what) {
  MetricValue v;
  if (!a.defined() || !b.defined()) {
    v.reason = std::string(what) + " undefined: " + (a.defined() ? b.reason : a.reason);
    return v;
  }
  // 2ab/(a+b) with a = p/q, b = r/s is 2pr / (ps + rq).
  const auto p = static_cast<unsigned __int128>(a.value->num());
  const auto q = static_cast<unsigned __int128>(a.value->den());
  const auto r = static_cast<unsigned __int128>(b.value->num());
  const auto s = static_cast<unsigned __int128>(b.value->den());
  unsigned __int128 num = 2 * p * r;
  unsigned __int128 den = p * s + r * q;
  if (den == 0) {
    v.reason = std::string(what) + " undefined: both rates are zero";
    return v;
  }
  unsigned __int128 x = num, y = den;
  while (y != 0) {
    const auto t = x % y;
    x = y;
    y = t;
  }
  num /= x;
  den /= x;
  v.value = Rational(static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den));
  return v;
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  prefiltered_hate += o.prefiltered_hate;
  prefiltered_benign += o.prefiltered_benign;
  return *this;
}

std::vector<ScoredRecord> JoinLabels(std::span<const OutcomeRecord> records,
                                     std::span<const Message> corpus) {
  std::unordered_map<std::string_view, const Message*> by_id;
  by_id.reserve(corpus.size());
  for (const auto& m : corpus) by_id.emplace(m.id, &m);

  std::vector<ScoredRecord> out;
  out.reserve(records.size());
  std::vector<std::string> missing;
  for (const auto& r : records) {
    auto it = by_id.find(r.id);
    if (it == by_id.end() || !it->second->label) {
      missing.push_back(r.id);
      continue;
    }
    const Message& m = *it->second;
    out.push_back({r.id, r.text, r.outcome, *m.label, m.targets, {}});
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " record(s) lack ground truth:";
    for (const auto& id : missing) msg += " " + id;
    throw ScoringError(msg);
  }
  return out;
}

void Accumulate(ConfusionCounts& c, const Outcome& outcome, Label label) {
  const bool blocked = IsBlocked(outcome);
  const bool pre = std::holds_alternative<PreFiltered>(outcome);
  if (label == Label::kHate) {
    (blocked ? c.tp : c.fn) += 1;
    if (pre) ++c.prefiltered_hate;
  } else {
    (blocked ? c.fp : c.tn) += 1;
    if (pre) ++c.prefiltered_benign;
  }
}

ConfusionCounts confusion(std::span<const ScoredRecord> records) {
  ConfusionCounts c;
  for (const auto& r : records) Accumulate(c, r.outcome, r.label);
  return c;
}

RateReport rates(const ConfusionCounts& c) {
  RateReport r;
  r.counts = c;
  r.accuracy = MetricValue::Of(c.tp + c.tn, c.total(), "accuracy");
  r.precision = MetricValue::Of(c.tp, c.tp + c.fp, "precision");
  r.recall = MetricValue::Of(c.tp, c.tp + c.fn, "recall");
  r.tnr = MetricValue::Of(c.tn, c.tn + c.fp, "TNR");
  r.f1_pr = HarmonicMean(r.precision, r.recall, "F1(P,R)");
  r.f1_tpr_tnr = HarmonicMean(r.recall, r.tnr, "F1(TPR,TNR)");
  r.pf = MetricValue::Of(c.prefiltered_hate, c.tp, "Pf");
  r.pf_of_hate = MetricValue::Of(c.prefiltered_hate, c.tp + c.fn, "Pf of hate");
  return r;
}

void TallyFirings(FiringTally& tally, const FilterCriterion& subset,
                  std::span<const ScoredRecord> records, const CategoryMap& categories) {
  for (const auto& r : records) {
    if (const auto* m = std::get_if<Moderated>(&r.outcome)) {
      ++tally[{subset, categories.CriterionFor(m->category)}];
    }
  }
}

std::map<FilterCriterion, MetricValue> filter_precision(const FiringTally& tally) {
  std::map<FilterCriterion, std::uint64_t> own;
  std::map<FilterCriterion, std::uint64_t> all;
  for (const auto& [key, n] : tally) {
    const auto& [subset, firing] = key;
    all[firing] += n;
    if (subset == firing) own[firing] += n;
  }
  std::map<FilterCriterion, MetricValue> out;
  for (const auto& [firing, n] : all) {
    out[firing] = MetricValue::Of(own[firing], n, "filter precision " + firing.name());
  }
  return out;
}

void TagGroups(std::span<ScoredRecord> records, const MappingTable& table, Grouping grouping) {
  std::vector<std::pair<std::string, std::set<std::string>>> subsets;
  if (grouping == Grouping::kCriterion) {
    for (const auto& [crit, _] : table.filters) {
      subsets.emplace_back(crit.name(), SubsetMembers(crit.name(), table));
    }
  } else {
    for (const auto& [name, _] : table.communities) {
      subsets.emplace_back(name, SubsetMembers(name, table));
    }
  }
  for (auto& r : records) {
    r.groups.clear();
    Message probe;
    probe.targets = r.targets;
    for (const auto& [name, members] : subsets) {
      if (InSubset(probe, members, table)) r.groups.push_back(name);
    }
  }
}

StratifiedRecall stratified_recall(std::span<const ScoredRecord> records,
                                   std::span<const std::string> order) {
  std::vector<std::string> names(order.begin(), order.end());
  std::map<std::string, ConfusionCounts> counts;
  for (const auto& r : records) {
    for (const auto& g : r.groups) {
      auto [it, inserted] = counts.try_emplace(g);
      if (inserted && order.empty()) names.push_back(g);
      Accumulate(it->second, r.outcome, r.label);
    }
  }
  StratifiedRecall out;
  for (const auto& name : names) {
    auto it = counts.find(name);
    const ConfusionCounts c = it == counts.end() ? ConfusionCounts{} : it->second;
    if (c.tp + c.fn == 0) {
      out.omitted.push_back(name);
      continue;
    }
    const RateReport rr = rates(c);
    out.groups.push_back({name, c, rr.recall, rr.pf, rr.pf_of_hate});
  }
  return out;
}

std::vector<std::pair<std::string, std::uint64_t>> prefiltered_unigrams(
    std::span<const OutcomeRecord> records, const std::set<std::string>& stopwords) {
  std::map<std::string, std::uint64_t> freq;
  for (const auto& r : records) {
    if (!std::holds_alternative<PreFiltered>(r.outcome)) continue;
    for (auto& tok : normalize(r.text)) {
      if (!stopwords.contains(tok)) ++freq[std::move(tok)];
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> out(freq.begin(), freq.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::set<std::string> LoadStopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stopword list " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (auto& tok : normalize(line)) out.insert(std::move(tok));
  }
  return out;
}

}  // namespace modaudit
