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

// Serial vs OpenMP kernels on a synthetic corpus.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "modaudit/kernels.h"

namespace {

using namespace modaudit;

std::shared_ptr<const Lexicon> BenchLexicon() {
  std::vector<LexiconEntry> entries;
  const auto& cats = ModerationCategory::BuiltIns();
  for (int i = 0; i < 200; ++i) {
    entries.push_back({"zq" + std::to_string(i), cats[i % 4], FilterLevel(1 + i % 4), false});
  }
  for (int i = 0; i < 20; ++i) entries.push_back({"pf" + std::to_string(i), std::nullopt, FilterLevel(1), true});
  return std::make_shared<const Lexicon>(std::move(entries));
}

std::vector<std::string> BenchTexts(std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string t;
    for (int w = 0; w < 24; ++w) {
      const auto r = rng() % 1000;
      if (r < 5) {
        t += "zq" + std::to_string(rng() % 200);
      } else if (r < 6) {
        t += "pf" + std::to_string(rng() % 20);
      } else {
        t += "word" + std::to_string(r);
      }
      t += ' ';
    }
    out.push_back(std::move(t));
  }
  return out;
}

ChannelState BenchChannel() {
  ChannelState cs;
  cs.channel = "bench";
  cs.config = FilterConfig::AllBuiltIns(FilterLevel(3));
  cs.lexicon = BenchLexicon();
  return cs;
}

void BM_ModerateSerial(benchmark::State& state) {
  const auto cs = BenchChannel();
  const auto texts = BenchTexts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ModerateBatchSerial(texts, cs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ModerateParallel(benchmark::State& state) {
  const auto cs = BenchChannel();
  const auto texts = BenchTexts(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ModerateBatch(texts, cs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<ScoredRecord> BenchRecords(std::size_t n) {
  std::mt19937_64 rng(11);
  std::vector<ScoredRecord> out(n);
  for (auto& r : out) {
    switch (rng() % 3) {
      case 0:
        r.outcome = Passed{};
        break;
      case 1:
        r.outcome = PreFiltered{};
        break;
      default:
        r.outcome = Moderated{ModerationCategory::Racism(), {"x"}, FilterLevel(2)};
    }
    r.label = rng() % 2 ? Label::kHate : Label::kBenign;
  }
  return out;
}

void BM_ConfusionSerial(benchmark::State& state) {
  const auto records = BenchRecords(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::TallyConfusionSerial(records));
}

void BM_ConfusionParallel(benchmark::State& state) {
  const auto records = BenchRecords(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::TallyConfusion(records));
}

MappingTable BenchTable() {
  return MappingTable::Parse(R"({
    "standardization": {"Group A": ["a1", "a2"], "Group B": ["b1"], "Group C": ["c1", "c2"]},
    "filters": {"RER": ["Group A"], "SSG": ["Group B", "Group C"]},
    "communities": {"A": ["Group A"]}
  })");
}

std::vector<Message> BenchMessages(std::size_t n) {
  static const char* kTargets[] = {"a1", "a2", "b1", "c1", "c2", "z"};
  std::mt19937_64 rng(13);
  std::vector<Message> out(n);
  for (auto& m : out) {
    m.targets = {kTargets[rng() % 6], kTargets[rng() % 6]};
  }
  return out;
}

void BM_SubsetsSerial(benchmark::State& state) {
  const auto table = BenchTable();
  const auto msgs = BenchMessages(static_cast<std::size_t>(state.range(0)));
  const std::vector<std::string> names = {"RER", "SSG", "A"};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::CountSubsetsSerial(msgs, table, names));
}

void BM_SubsetsParallel(benchmark::State& state) {
  const auto table = BenchTable();
  const auto msgs = BenchMessages(static_cast<std::size_t>(state.range(0)));
  const std::vector<std::string> names = {"RER", "SSG", "A"};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::CountSubsets(msgs, table, names));
}

BENCHMARK(BM_ModerateSerial)->Arg(2000)->Arg(20000);
BENCHMARK(BM_ModerateParallel)->Arg(2000)->Arg(20000);
BENCHMARK(BM_ConfusionSerial)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_ConfusionParallel)->Arg(100000)->Arg(1000000);
BENCHMARK(BM_SubsetsSerial)->Arg(20000);
BENCHMARK(BM_SubsetsParallel)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
