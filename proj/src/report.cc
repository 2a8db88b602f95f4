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

#include "modaudit/report.h"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace modaudit {
namespace {

double Round(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(x * scale) / scale;
}

std::string Quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string Format(const Cell& c, int decimals) {
  struct Visitor {
    int decimals;
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const { return Quote(s); }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      std::ostringstream os;
      os << std::fixed << std::setprecision(decimals) << v;
      return os.str();
    }
  };
  return std::visit(Visitor{decimals}, c);
}

Cell Count(std::uint64_t n) { return static_cast<std::int64_t>(n); }

}  // namespace

void WriteCsv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << Quote(table.columns[i]);
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << Format(row[i], table.decimals);
    }
    out << "\n";
  }
}

nlohmann::ordered_json ToJson(const Table& table) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) {
      const Cell& c = row[i];
      auto& slot = obj[table.columns[i]];
      if (const auto* s = std::get_if<std::string>(&c)) {
        slot = *s;
      } else if (const auto* n = std::get_if<std::int64_t>(&c)) {
        slot = *n;
      } else if (const auto* d = std::get_if<double>(&c)) {
        slot = Round(*d, table.decimals);
      } else {
        slot = nullptr;
      }
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

Cell RateCell(const MetricValue& v) {
  if (!v.defined()) return std::monostate{};
  return v.value->ToDouble();
}

Table RatesTable(const std::vector<std::pair<std::string, RateReport>>& rows) {
  Table t;
  t.name = "rates";
  t.columns = {"row",       "n",        "tp",     "fp",  "tn",    "fn",         "prefiltered",
               "accuracy",  "precision", "recall", "tnr", "f1_pr", "f1_tpr_tnr", "pf",
               "pf_of_hate"};
  for (const auto& [name, r] : rows) {
    const auto& c = r.counts;
    t.rows.push_back({name, Count(c.total()), Count(c.tp), Count(c.fp), Count(c.tn), Count(c.fn),
                      Count(c.prefiltered_hate + c.prefiltered_benign), RateCell(r.accuracy),
                      RateCell(r.precision), RateCell(r.recall), RateCell(r.tnr),
                      RateCell(r.f1_pr), RateCell(r.f1_tpr_tnr), RateCell(r.pf),
                      RateCell(r.pf_of_hate)});
  }
  return t;
}

Table StratifiedTable(const StratifiedRecall& s) {
  Table t;
  t.name = "stratified";
  t.columns = {"group", "n_hate", "recall", "pf", "pf_of_hate"};
  for (const auto& g : s.groups) {
    t.rows.push_back({g.group, Count(g.counts.tp + g.counts.fn), RateCell(g.recall),
                      RateCell(g.pf), RateCell(g.pf_of_hate)});
  }
  for (const auto& name : s.omitted) {
    t.rows.push_back({name, std::int64_t{0}, std::monostate{}, std::monostate{}, std::monostate{}});
  }
  return t;
}

Table FilterPrecisionTable(const std::map<FilterCriterion, MetricValue>& p) {
  Table t;
  t.name = "filter_precision";
  t.columns = {"filter", "precision"};
  for (const auto& [crit, v] : p) t.rows.push_back({crit.name(), RateCell(v)});
  return t;
}

Table UnigramTable(const std::vector<std::pair<std::string, std::uint64_t>>& ranked,
                   std::size_t top_k) {
  Table t;
  t.name = "prefiltered_unigrams";
  t.columns = {"rank", "token", "frequency"};
  for (std::size_t i = 0; i < ranked.size() && i < top_k; ++i) {
    t.rows.push_back({static_cast<std::int64_t>(i + 1), ranked[i].first, Count(ranked[i].second)});
  }
  return t;
}

nlohmann::ordered_json PlotData(const StratifiedRecall& s) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& g : s.groups) {
    const double recall = g.recall.defined() ? g.recall.value->ToDouble() : 0.0;
    const double pre = g.pf_of_hate.defined() ? g.pf_of_hate.value->ToDouble() : 0.0;
    nlohmann::ordered_json o;
    o["group"] = g.group;
    o["recall"] = Round(recall, 3);
    o["filtered"] = Round(recall - pre, 3);
    o["prefiltered"] = Round(pre, 3);
    arr.push_back(std::move(o));
  }
  return arr;
}

}  // namespace modaudit
