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

#include "modaudit/kernels.h"

#include <omp.h>

#include <cstdint>
#include <set>

namespace modaudit::kernels {

int MaxThreads() { return omp_get_max_threads(); }

std::vector<Outcome> ModerateBatch(std::span<const std::string> texts, const ChannelState& state) {
  std::vector<Outcome> out(texts.size());
  const auto n = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = moderate(texts[static_cast<std::size_t>(i)], state);
  }
  return out;
}

std::vector<Outcome> ModerateBatchSerial(std::span<const std::string> texts,
                                         const ChannelState& state) {
  std::vector<Outcome> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(moderate(t, state));
  return out;
}

ConfusionCounts TallyConfusion(std::span<const ScoredRecord> records) {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0, ph = 0, pb = 0;
  const auto n = static_cast<std::int64_t>(records.size());
#pragma omp parallel for reduction(+ : tp, fp, tn, fn, ph, pb) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    ConfusionCounts c;
    const auto& r = records[static_cast<std::size_t>(i)];
    Accumulate(c, r.outcome, r.label);
    tp += c.tp;
    fp += c.fp;
    tn += c.tn;
    fn += c.fn;
    ph += c.prefiltered_hate;
    pb += c.prefiltered_benign;
  }
  return {tp, fp, tn, fn, ph, pb};
}

ConfusionCounts TallyConfusionSerial(std::span<const ScoredRecord> records) {
  return confusion(records);
}

namespace {

std::vector<std::set<std::string>> Members(const MappingTable& table,
                                           std::span<const std::string> names) {
  std::vector<std::set<std::string>> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(SubsetMembers(name, table));
  return out;
}

}  // namespace

std::vector<std::size_t> CountSubsets(std::span<const Message> messages, const MappingTable& table,
                                      std::span<const std::string> names) {
  const auto members = Members(table, names);
  const std::size_t k = names.size();
  std::vector<std::size_t> total(k, 0);
  const auto n = static_cast<std::int64_t>(messages.size());
#pragma omp parallel
  {
    std::vector<std::size_t> local(k, 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& m = messages[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < k; ++j) {
        if (InSubset(m, members[j], table)) ++local[j];
      }
    }
#pragma omp critical
    for (std::size_t j = 0; j < k; ++j) total[j] += local[j];
  }
  return total;
}

std::vector<std::size_t> CountSubsetsSerial(std::span<const Message> messages,
                                            const MappingTable& table,
                                            std::span<const std::string> names) {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(extract_subset(messages, name, table).size());
  return out;
}

}  // namespace modaudit::kernels
