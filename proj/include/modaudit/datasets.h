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

#ifndef MODAUDIT_DATASETS_H_
#define MODAUDIT_DATASETS_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modaudit/core.h"

namespace modaudit {

enum class DatasetKind { kSbic, kDynaHate, kToxiGen, kIhc };

std::string_view ToString(DatasetKind k);
// Accepts "sbic", "dynahate", "toxigen", "ihc" (any case).
DatasetKind ParseDatasetKind(std::string_view s);

// Column names. Empty means the kind's default, which may try several
// spellings (ToxiGen ships both "target_group" and "group").
struct ColumnBindings {
  std::string text;
  std::string label;  // label, score or class column
  std::string target;
  std::string prompt_label;  // ToxiGen only
};

struct DatasetSpec {
  DatasetKind kind = DatasetKind::kDynaHate;
  std::filesystem::path path;
  ColumnBindings columns;
  // SBIC: hate iff mean offensiveness >= threshold.
  double sbic_threshold = 1.0;
  // 0 picks '\t' for .tsv files and ',' otherwise.
  char delimiter = 0;
  // Defaults to the kind name; prefixes message ids.
  std::string name;
};

// One Message per usable row (SBIC: per distinct post, annotations
// aggregated). Texts are NFC-normalized; empty texts are skipped. ToxiGen
// rows outside the score bands (hate: toxic prompt and score in [0.8, 1];
// benign: benign prompt and score in [0, 0.2]) are excluded.
// Throws IngestionError naming a missing column.
std::vector<Message> load(const DatasetSpec& spec);
std::vector<Message> load(const DatasetSpec& spec, std::istream& in);

// Throws ValidationError outside [0, 1].
Label sbic_label(double score, double threshold);

// Bands used to keep ToxiGen rows; nullopt means the row is excluded.
std::optional<Label> toxigen_label(bool toxic_prompt, double roberta_score);

// Target standardization plus filter and community maps for one corpus.
// Keys are compared lower-cased and trimmed.
struct MappingTable {
  // raw target -> canonical groups. A raw term may belong to several groups.
  std::map<std::string, std::vector<std::string>> standardization;
  std::vector<std::string> canonical_groups;  // table order
  // criterion -> mapped groups (or raw targets when there is no
  // standardization), table order
  std::vector<std::pair<FilterCriterion, std::vector<std::string>>> filters;
  std::vector<std::pair<std::string, std::vector<std::string>>> communities;
  // Reference subset sizes shipped with the table, if any.
  std::map<std::string, std::size_t> expected_counts;

  // JSON: {"standardization": {group: [raw...]}, "filters": {crit: [...]},
  //        "communities": {name: [...]}}. Throws ValidationError when a
  // filter/community member is not a canonical group of a standardizing
  // table.
  static MappingTable Parse(std::string_view json);
  static MappingTable Load(const std::filesystem::path& path);

  std::vector<std::string> SubsetNames() const;
};

struct StandardizedTarget {
  std::vector<std::string> groups;  // empty = unmapped
  bool mapped() const { return !groups.empty(); }
};

// Tables without a standardization section treat a raw target as its own
// group when some filter or community lists it.
StandardizedTarget standardize_target(std::string_view raw, const MappingTable& table);

// Messages with at least one target mapping to the named criterion or
// community. Throws LookupError for unknown names.
std::vector<Message> extract_subset(std::span<const Message> messages, std::string_view name,
                                    const MappingTable& table);

// Resolved member set (lower-cased) of a criterion or community.
std::set<std::string> SubsetMembers(std::string_view name, const MappingTable& table);

// Whether any standardized target of `m` is in `members`.
bool InSubset(const Message& m, const std::set<std::string>& members, const MappingTable& table);

// Corpus JSONL: {"id","text","label":"hate"|"benign"|null,"targets":[...],"source"}.
std::string ToJsonLine(const Message& m);
Message ParseMessageLine(std::string_view line);
void WriteCorpus(std::ostream& out, std::span<const Message> messages);
std::vector<Message> ReadCorpus(std::istream& in);
std::vector<Message> ReadCorpus(const std::filesystem::path& path);

}  // namespace modaudit

#endif  // MODAUDIT_DATASETS_H_
