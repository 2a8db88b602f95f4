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

#ifndef MODAUDIT_REPORT_H_
#define MODAUDIT_REPORT_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "modaudit/metrics.h"

namespace modaudit {

// Empty cells are undefined metrics.
using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  int decimals = 3;
};

// RFC 4180 output with a header row. Doubles are fixed at `decimals`.
void WriteCsv(std::ostream& out, const Table& table);
// Array of objects keyed by column; doubles rounded to `decimals`, empty
// cells null.
nlohmann::ordered_json ToJson(const Table& table);

Cell RateCell(const MetricValue& v);

// One row per (name, report): counts and every rate.
Table RatesTable(const std::vector<std::pair<std::string, RateReport>>& rows);
// group, n_hate, recall, pf, pf_of_hate. Omitted groups are listed with
// empty rates.
Table StratifiedTable(const StratifiedRecall& s);
Table FilterPrecisionTable(const std::map<FilterCriterion, MetricValue>& p);
Table UnigramTable(const std::vector<std::pair<std::string, std::uint64_t>>& ranked,
                   std::size_t top_k = 10);

// Per-group bar values for external plotting: the moderated bar split into
// the channel-filter part and the pre-filtered part.
nlohmann::ordered_json PlotData(const StratifiedRecall& s);

}  // namespace modaudit

#endif  // MODAUDIT_REPORT_H_
