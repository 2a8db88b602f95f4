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

#ifndef MODAUDIT_RUN_H_
#define MODAUDIT_RUN_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "modaudit/core.h"
#include "modaudit/datasets.h"
#include "modaudit/transport.h"

namespace modaudit {

// One input corpus. Either a raw dataset file (`spec`) or a corpus JSONL
// written by WriteCorpus (`corpus`).
struct DatasetEntry {
  std::string name;
  std::optional<DatasetSpec> spec;
  std::filesystem::path corpus;
  std::filesystem::path mapping;  // optional
  // Keep a seeded random sample of this many messages; 0 keeps all.
  std::size_t sample = 0;
};

struct MockOptions {
  std::filesystem::path lexicon;
  bool prefilter_raw = false;
};

struct ProbeOptions {
  std::filesystem::path slur_map;
  std::filesystem::path fragments;  // one token per line
  std::filesystem::path stopwords;
  std::vector<std::filesystem::path> probe_sets;
  std::size_t top_k = 10;
};

struct RunConfig {
  std::string run_id;
  std::string recipe = "table1";
  std::vector<DatasetEntry> datasets;
  FilterConfig filters = FilterConfig::AllBuiltIns(FilterLevel(4));
  RateConfig rate;
  // "loopback" starts an in-process mock; otherwise "host:port".
  std::string endpoint = "loopback";
  MockOptions mock;
  std::string channel = "audit";
  // Session label -> channel name for network endpoints.
  std::map<std::string, std::string> channels;
  Duration timeout = std::chrono::seconds(10);
  Duration jitter_bound = std::chrono::milliseconds(100);
  bool enforce_jitter = true;
  // Messages per session chunk; each chunk is reconciled and persisted
  // before the next starts. 0 sends everything in one chunk.
  std::size_t chunk_size = 0;
  ProbeOptions probes;
  std::vector<int> sweep_levels = {0, 1, 2, 3, 4};
  std::uint64_t seed = 1;
  std::filesystem::path out = "runs";

  // Relative paths resolve against `base_dir`. Throws ConfigError.
  static RunConfig Parse(std::string_view json, const std::filesystem::path& base_dir = {});
  static RunConfig Load(const std::filesystem::path& path);

  // Canonical form; Parse(ToJson().dump()) round-trips.
  nlohmann::ordered_json ToJson() const;
  // Throws ConfigError for unknown recipes, missing files or bad values.
  void Validate() const;
};

// Command-line overrides applied on top of the config file.
struct RunOverrides {
  std::optional<std::string> recipe;
  std::optional<std::string> run_id;
  // Comma-separated criteria.
  std::optional<std::string> active;
  // "N" for every active criterion, or "Crit=N,Crit=N".
  std::optional<std::string> level;
  std::optional<int> rate_limit;
  std::optional<std::string> endpoint;
  std::optional<double> timeout_s;
  std::optional<std::filesystem::path> out;
};

void ApplyOverrides(RunConfig& config, const RunOverrides& overrides);

const std::vector<std::string>& RecipeNames();

struct RunSummary {
  std::filesystem::path run_dir;
  std::size_t sessions = 0;
  std::size_t sent = 0;     // messages sent by this invocation
  std::size_t skipped = 0;  // already resolved by an earlier invocation
  std::size_t conflicts = 0;
  std::vector<std::filesystem::path> reports;
};

// Runs (or resumes) the configured recipe. Artifacts go to out/run_id.
// Throws ConfigError when the run id exists with a different config or
// corpus, SessionError when the target fails (artifacts written so far are
// kept), ScoringError when records cannot be scored.
RunSummary run(const RunConfig& config, std::ostream* log = nullptr);

// Rebuilds the reports of a finished run from its artifacts without
// contacting any target. Throws ConfigError if the run is incomplete.
RunSummary report(const std::filesystem::path& run_dir, std::ostream* log = nullptr);

// Lower-case hex SHA-256.
std::string Sha256Hex(std::string_view data);

// Deterministic Fisher-Yates permutation driven by mt19937_64.
std::vector<std::size_t> Permutation(std::size_t n, std::uint64_t seed);

}  // namespace modaudit

#endif  // MODAUDIT_RUN_H_
