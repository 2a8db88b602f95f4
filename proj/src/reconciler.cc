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

#include "modaudit/reconciler.h"

#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

namespace modaudit {

std::string_view ToString(ConflictKind k) {
  switch (k) {
    case ConflictKind::kBothStreams:
      return "both_streams";
    case ConflictKind::kDuplicateSend:
      return "duplicate_send";
    case ConflictKind::kDuplicateEcho:
      return "duplicate_echo";
    case ConflictKind::kDuplicateEvent:
      return "duplicate_event";
    case ConflictKind::kUnknownId:
      return "unknown_id";
    case ConflictKind::kObservedBeforeSend:
      return "observed_before_send";
  }
  return "unknown";
}

IncompleteSessionError::IncompleteSessionError(std::vector<std::string> pending,
                                               Reconciliation partial)
    : Error("session incomplete: " + std::to_string(pending.size()) +
            " id(s) not yet timed out"),
      pending_(std::move(pending)),
      partial_(std::move(partial)) {}

Reconciliation reconcile(const RawLogs& logs, Duration timeout, std::string_view run_id) {
  struct Seen {
    std::vector<const EchoEntry*> echoes;
    std::vector<const EventEntry*> events;
    int sends = 0;
  };
  std::unordered_map<std::string, Seen> by_id;
  for (const auto& s : logs.sent) ++by_id[s.id].sends;
  for (const auto& e : logs.echoes) by_id[e.id].echoes.push_back(&e);
  for (const auto& e : logs.events) by_id[e.id].events.push_back(&e);

  Reconciliation out;
  std::vector<std::string> pending;
  std::unordered_map<std::string, bool> emitted;

  for (const auto& s : logs.sent) {
    if (emitted.contains(s.id)) continue;
    emitted[s.id] = true;
    const Seen& seen = by_id[s.id];
    auto conflict = [&](ConflictKind k, std::string detail) {
      out.conflicts.push_back({s.id, k, std::move(detail)});
    };
    if (seen.sends > 1) {
      conflict(ConflictKind::kDuplicateSend, std::to_string(seen.sends) + " sends");
      continue;
    }
    if (!seen.echoes.empty() && !seen.events.empty()) {
      conflict(ConflictKind::kBothStreams, "echoed and moderated");
      continue;
    }
    if (seen.echoes.size() > 1) {
      conflict(ConflictKind::kDuplicateEcho, std::to_string(seen.echoes.size()) + " echoes");
      continue;
    }
    if (seen.events.size() > 1) {
      conflict(ConflictKind::kDuplicateEvent, std::to_string(seen.events.size()) + " events");
      continue;
    }

    OutcomeRecord rec{s.id, s.text, Passed{}, std::nullopt, std::string(run_id)};
    Duration observed_at{0};
    if (!seen.echoes.empty()) {
      observed_at = seen.echoes.front()->received_at;
    } else if (!seen.events.empty()) {
      const EventEntry& ev = *seen.events.front();
      observed_at = ev.received_at;
      std::vector<std::string> fragments = ev.fragments;
      if (fragments.empty()) fragments.push_back(ev.text);
      rec.outcome = Moderated{ev.category, std::move(fragments), ev.level};
    } else if (logs.session_end - s.sent_at >= timeout) {
      rec.outcome = PreFiltered{};
      out.records.push_back(std::move(rec));
      continue;
    } else {
      pending.push_back(s.id);
      continue;
    }
    if (observed_at < s.sent_at) {
      conflict(ConflictKind::kObservedBeforeSend, "observation precedes send");
      continue;
    }
    rec.latency = observed_at - s.sent_at;
    out.records.push_back(std::move(rec));
  }

  // Observations with no matching send, in first-seen order.
  std::unordered_map<std::string, bool> reported;
  auto unknown = [&](const std::string& id) {
    if (by_id[id].sends == 0 && !reported[id]) {
      reported[id] = true;
      out.conflicts.push_back({id, ConflictKind::kUnknownId, "observed but never sent"});
    }
  };
  for (const auto& e : logs.echoes) unknown(e.id);
  for (const auto& e : logs.events) unknown(e.id);

  if (!pending.empty()) throw IncompleteSessionError(std::move(pending), std::move(out));
  return out;
}

std::string ToJsonLine(const OutcomeRecord& r, bool include_latency) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["id"] = r.id;
  j["text"] = r.text;
  j["outcome"] = ToString(KindOf(r.outcome));
  if (const auto* m = std::get_if<Moderated>(&r.outcome)) {
    j["category"] = m->category.name();
    j["fragments"] = m->fragments;
    j["level"] = m->level.value();
  }
  if (include_latency && r.latency) j["latency_us"] = r.latency->count();
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

OutcomeRecord ParseRecordLine(std::string_view line) {
  try {
    auto j = nlohmann::json::parse(line);
    OutcomeRecord r;
    r.run_id = j.value("run_id", "");
    r.id = j.at("id").get<std::string>();
    r.text = j.value("text", "");
    switch (ParseOutcomeKind(j.at("outcome").get<std::string>())) {
      case OutcomeKind::kPassed:
        r.outcome = Passed{};
        break;
      case OutcomeKind::kPreFiltered:
        r.outcome = PreFiltered{};
        break;
      case OutcomeKind::kModerated:
        r.outcome = Moderated{ModerationCategory::Parse(j.at("category").get<std::string>()),
                              j.value("fragments", std::vector<std::string>{}),
                              FilterLevel(j.value("level", 0))};
        break;
    }
    if (j.contains("latency_us")) r.latency = Duration(j["latency_us"].get<int64_t>());
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("bad record line: ") + ex.what());
  }
}

std::string ToJsonLine(const ConflictRecord& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["conflict"] = ToString(c.kind);
  j["detail"] = c.detail;
  return j.dump();
}

void WriteRecords(std::ostream& out, const std::vector<OutcomeRecord>& records) {
  for (const auto& r : records) out << ToJsonLine(r) << '\n';
}

std::vector<OutcomeRecord> ReadRecords(std::istream& in) {
  std::vector<OutcomeRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(ParseRecordLine(line));
  }
  return out;
}

}  // namespace modaudit
