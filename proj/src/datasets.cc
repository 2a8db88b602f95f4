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

#include "modaudit/datasets.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "modaudit/csv.h"
#include "modaudit/errors.h"
#include "modaudit/text.h"

namespace modaudit {
namespace {

std::string Trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string Key(std::string_view s) { return ToLower(Trim(s)); }

std::optional<double> ParseDouble(std::string_view s) {
  std::string t = Trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

struct Columns {
  int text = -1;
  int label = -1;
  int target = -1;
  int prompt_label = -1;
};

int Find(const std::vector<std::string>& header, const std::string& bound,
         std::initializer_list<const char*> defaults, bool required, const std::string& role) {
  std::vector<std::string> names;
  if (!bound.empty()) {
    names.push_back(bound);
  } else {
    for (const char* d : defaults) names.emplace_back(d);
  }
  for (const auto& n : names) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (Trim(header[i]) == n) return static_cast<int>(i);
    }
  }
  if (required) {
    std::string all;
    for (const auto& n : names) all += (all.empty() ? "" : "|") + n;
    throw IngestionError("missing " + role + " column '" + all + "'");
  }
  return -1;
}

Columns Resolve(const DatasetSpec& spec, const std::vector<std::string>& header) {
  const auto& b = spec.columns;
  Columns c;
  switch (spec.kind) {
    case DatasetKind::kSbic:
      c.text = Find(header, b.text, {"post"}, true, "text");
      c.label = Find(header, b.label, {"offensiveYN"}, true, "score");
      c.target = Find(header, b.target, {"targetMinority"}, true, "target");
      break;
    case DatasetKind::kDynaHate:
      c.text = Find(header, b.text, {"text"}, true, "text");
      c.label = Find(header, b.label, {"label"}, true, "label");
      c.target = Find(header, b.target, {"target"}, true, "target");
      break;
    case DatasetKind::kToxiGen:
      c.text = Find(header, b.text, {"generation"}, true, "text");
      c.label = Find(header, b.label, {"roberta_prediction"}, true, "score");
      c.prompt_label = Find(header, b.prompt_label, {"prompt_label"}, true, "prompt label");
      c.target = Find(header, b.target, {"target_group", "group"}, true, "target");
      break;
    case DatasetKind::kIhc:
      c.text = Find(header, b.text, {"post"}, true, "text");
      c.label = Find(header, b.label, {"class", "label"}, true, "label");
      c.target = Find(header, b.target, {"target"}, false, "target");
      break;
  }
  return c;
}

const std::string& Cell(const std::vector<std::string>& row, int idx) {
  static const std::string kEmpty;
  return idx >= 0 && static_cast<std::size_t>(idx) < row.size() ? row[idx] : kEmpty;
}

std::vector<std::string> SplitTargets(std::string_view raw) {
  std::vector<std::string> out;
  std::string t = Trim(raw);
  if (t.empty()) return out;
  auto add = [&](std::string v) {
    v = Trim(v);
    if (!v.empty() && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  if (t.front() == '[') {
    auto j = nlohmann::json::parse(t, nullptr, false);
    if (j.is_array()) {
      for (const auto& v : j) {
        if (v.is_string()) add(v.get<std::string>());
      }
      return out;
    }
  }
  std::size_t start = 0;
  while (start <= t.size()) {
    auto comma = t.find(',', start);
    if (comma == std::string::npos) comma = t.size();
    add(t.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::optional<Label> BinaryLabel(std::string_view raw, DatasetKind kind) {
  std::string v = Key(raw);
  if (kind == DatasetKind::kIhc) {
    if (v == "not_hate" || v == "0") return Label::kBenign;
    if (v == "implicit_hate" || v == "explicit_hate" || v == "1") return Label::kHate;
    return std::nullopt;
  }
  if (v == "hate" || v == "1") return Label::kHate;
  if (v == "nothate" || v == "0") return Label::kBenign;
  return std::nullopt;
}

bool Truthy(std::string_view raw) {
  std::string v = Key(raw);
  if (v == "true" || v == "toxic") return true;
  auto d = ParseDouble(v);
  return d && *d >= 0.5;
}

}  // namespace

std::string_view ToString(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSbic:
      return "sbic";
    case DatasetKind::kDynaHate:
      return "dynahate";
    case DatasetKind::kToxiGen:
      return "toxigen";
    case DatasetKind::kIhc:
      return "ihc";
  }
  return "unknown";
}

DatasetKind ParseDatasetKind(std::string_view s) {
  std::string k = Key(s);
  if (k == "sbic") return DatasetKind::kSbic;
  if (k == "dynahate") return DatasetKind::kDynaHate;
  if (k == "toxigen") return DatasetKind::kToxiGen;
  if (k == "ihc") return DatasetKind::kIhc;
  throw ConfigError("unknown dataset kind '" + std::string(s) + "'");
}

Label sbic_label(double score, double threshold) {
  if (!(score >= 0.0 && score <= 1.0) || !(threshold >= 0.0 && threshold <= 1.0)) {
    throw ValidationError("sbic_label inputs must lie in [0, 1]");
  }
  return score >= threshold ? Label::kHate : Label::kBenign;
}

std::optional<Label> toxigen_label(bool toxic_prompt, double roberta_score) {
  if (toxic_prompt && roberta_score >= 0.8 && roberta_score <= 1.0) return Label::kHate;
  if (!toxic_prompt && roberta_score >= 0.0 && roberta_score <= 0.2) return Label::kBenign;
  return std::nullopt;
}

std::vector<Message> load(const DatasetSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw IngestionError("cannot open dataset " + spec.path.string());
  return load(spec, in);
}

std::vector<Message> load(const DatasetSpec& spec, std::istream& in) {
  char delim = spec.delimiter;
  if (delim == 0) delim = spec.path.extension() == ".tsv" ? '\t' : ',';
  const std::string name = spec.name.empty() ? std::string(ToString(spec.kind)) : spec.name;

  CsvReader reader(in, delim);
  std::vector<std::string> row;
  if (!reader.ReadRow(row)) return {};
  const Columns cols = Resolve(spec, row);

  std::vector<Message> out;
  // SBIC: one row per annotation; aggregate per post.
  struct Agg {
    double sum = 0;
    int n = 0;
  };
  std::unordered_map<std::string, std::size_t> post_index;
  std::vector<Agg> aggs;

  std::size_t rowno = 0;
  while (reader.ReadRow(row)) {
    ++rowno;
    if (row.size() == 1 && row[0].empty()) continue;
    std::string text = ToNfc(Cell(row, cols.text));
    if (Trim(text).empty()) continue;
    const std::string id = name + ":" + std::to_string(rowno);

    switch (spec.kind) {
      case DatasetKind::kSbic: {
        auto [it, fresh] = post_index.try_emplace(text, out.size());
        if (fresh) {
          out.push_back({id, text, std::nullopt, {}, name});
          aggs.emplace_back();
        }
        Message& m = out[it->second];
        for (auto& t : SplitTargets(Cell(row, cols.target))) {
          if (std::find(m.targets.begin(), m.targets.end(), t) == m.targets.end()) {
            m.targets.push_back(std::move(t));
          }
        }
        if (auto score = ParseDouble(Cell(row, cols.label))) {
          aggs[it->second].sum += *score;
          aggs[it->second].n += 1;
        }
        break;
      }
      case DatasetKind::kDynaHate:
      case DatasetKind::kIhc: {
        auto label = BinaryLabel(Cell(row, cols.label), spec.kind);
        if (!label) {
          throw IngestionError(name + " line " + std::to_string(reader.line()) +
                               ": unrecognized label '" + Cell(row, cols.label) + "'");
        }
        out.push_back({id, text, label, SplitTargets(Cell(row, cols.target)), name});
        break;
      }
      case DatasetKind::kToxiGen: {
        auto score = ParseDouble(Cell(row, cols.label));
        if (!score) continue;
        auto label = toxigen_label(Truthy(Cell(row, cols.prompt_label)), *score);
        if (!label) continue;
        std::vector<std::string> targets;
        if (auto t = Trim(Cell(row, cols.target)); !t.empty()) targets.push_back(t);
        out.push_back({id, text, label, std::move(targets), name});
        break;
      }
    }
  }

  if (spec.kind == DatasetKind::kSbic) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (aggs[i].n == 0) continue;
      double mean = std::clamp(aggs[i].sum / aggs[i].n, 0.0, 1.0);
      out[i].label = sbic_label(mean, spec.sbic_threshold);
    }
  }
  return out;
}

MappingTable MappingTable::Parse(std::string_view json) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(json);
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("mapping table: ") + ex.what());
  }
  MappingTable t;
  auto add_std = [&](const std::string& raw, const std::string& group) {
    auto& groups = t.standardization[Key(raw)];
    if (std::find(groups.begin(), groups.end(), group) == groups.end()) groups.push_back(group);
  };
  if (j.contains("standardization")) {
    for (const auto& [group, raws] : j["standardization"].items()) {
      t.canonical_groups.push_back(group);
      for (const auto& raw : raws) add_std(raw.get<std::string>(), group);
    }
    for (const auto& group : t.canonical_groups) add_std(group, group);
  }
  std::set<std::string> canonical_keys;
  for (const auto& g : t.canonical_groups) canonical_keys.insert(Key(g));
  auto members = [&](const nlohmann::ordered_json& list, const std::string& owner) {
    std::vector<std::string> out;
    for (const auto& v : list) {
      std::string m = v.get<std::string>();
      if (!t.standardization.empty() && !canonical_keys.contains(Key(m))) {
        throw ValidationError("mapping '" + owner + "' lists '" + m +
                              "', which is not a standardized group");
      }
      out.push_back(m);
    }
    return out;
  };
  const auto empty = nlohmann::ordered_json::object();
  const auto& filters = j.contains("filters") ? j["filters"] : empty;
  const auto& communities = j.contains("communities") ? j["communities"] : empty;
  const auto& expected = j.contains("expected_counts") ? j["expected_counts"] : empty;
  for (const auto& [crit, list] : filters.items()) {
    t.filters.emplace_back(FilterCriterion::Parse(crit), members(list, crit));
  }
  for (const auto& [name, list] : communities.items()) {
    t.communities.emplace_back(name, members(list, name));
  }
  for (const auto& [name, n] : expected.items()) {
    t.expected_counts[name] = n.get<std::size_t>();
  }
  return t;
}

MappingTable MappingTable::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open mapping table " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::vector<std::string> MappingTable::SubsetNames() const {
  std::vector<std::string> out;
  for (const auto& [c, _] : filters) out.push_back(c.name());
  for (const auto& [n, _] : communities) out.push_back(n);
  return out;
}

StandardizedTarget standardize_target(std::string_view raw, const MappingTable& table) {
  const std::string key = Key(raw);
  StandardizedTarget st;
  if (key.empty()) return st;
  if (!table.standardization.empty()) {
    if (auto it = table.standardization.find(key); it != table.standardization.end()) {
      st.groups = it->second;
    }
    return st;
  }
  auto listed = [&](const auto& sections) {
    for (const auto& [_, list] : sections) {
      for (const auto& m : list) {
        if (Key(m) == key) return true;
      }
    }
    return false;
  };
  if (listed(table.filters) || listed(table.communities)) st.groups.push_back(key);
  return st;
}

std::set<std::string> SubsetMembers(std::string_view name, const MappingTable& table) {
  const std::string key = Key(name);
  std::set<std::string> out;
  for (const auto& [crit, list] : table.filters) {
    if (Key(crit.name()) == key) {
      for (const auto& m : list) out.insert(Key(m));
      return out;
    }
  }
  for (const auto& [community, list] : table.communities) {
    if (Key(community) == key) {
      for (const auto& m : list) out.insert(Key(m));
      return out;
    }
  }
  throw LookupError("no criterion or community named '" + std::string(name) + "'");
}

bool InSubset(const Message& m, const std::set<std::string>& members, const MappingTable& table) {
  for (const auto& raw : m.targets) {
    for (const auto& g : standardize_target(raw, table).groups) {
      if (members.contains(Key(g))) return true;
    }
  }
  return false;
}

std::vector<Message> extract_subset(std::span<const Message> messages, std::string_view name,
                                    const MappingTable& table) {
  const auto members = SubsetMembers(name, table);
  std::vector<Message> out;
  for (const auto& m : messages) {
    if (InSubset(m, members, table)) out.push_back(m);
  }
  return out;
}

std::string ToJsonLine(const Message& m) {
  nlohmann::ordered_json j;
  j["id"] = m.id;
  j["text"] = m.text;
  if (m.label) {
    j["label"] = *m.label == Label::kHate ? "hate" : "benign";
  } else {
    j["label"] = nullptr;
  }
  j["targets"] = m.targets;
  j["source"] = m.source;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

Message ParseMessageLine(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    Message m;
    m.id = j.at("id").get<std::string>();
    m.text = j.at("text").get<std::string>();
    if (j.contains("label") && j["label"].is_string()) {
      const auto l = j["label"].get<std::string>();
      if (l == "hate") {
        m.label = Label::kHate;
      } else if (l == "benign") {
        m.label = Label::kBenign;
      } else {
        throw ValidationError("label must be hate or benign, got '" + l + "'");
      }
    }
    m.targets = j.value("targets", std::vector<std::string>{});
    m.source = j.value("source", "");
    if (m.text.empty()) throw ValidationError("message " + m.id + " has empty text");
    return m;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("bad corpus line: ") + ex.what());
  }
}

void WriteCorpus(std::ostream& out, std::span<const Message> messages) {
  for (const auto& m : messages) out << ToJsonLine(m) << '\n';
}

std::vector<Message> ReadCorpus(std::istream& in) {
  std::vector<Message> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(ParseMessageLine(line));
  }
  return out;
}

std::vector<Message> ReadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus " + path.string());
  return ReadCorpus(in);
}

}  // namespace modaudit
