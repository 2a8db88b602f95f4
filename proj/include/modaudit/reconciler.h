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

#ifndef MODAUDIT_RECONCILER_H_
#define MODAUDIT_RECONCILER_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modaudit/core.h"
#include "modaudit/transport.h"

namespace modaudit {

struct OutcomeRecord {
  std::string id;
  std::string text;
  Outcome outcome;
  // Send to first observation; absent for PreFiltered.
  std::optional<Duration> latency;
  std::string run_id;
};

enum class ConflictKind {
  kBothStreams,         // echoed and evented
  kDuplicateSend,       // id sent more than once
  kDuplicateEcho,       // id echoed more than once
  kDuplicateEvent,      // id evented more than once
  kUnknownId,           // observed but never sent
  kObservedBeforeSend,  // observation timestamp precedes the send
};

std::string_view ToString(ConflictKind k);

struct ConflictRecord {
  std::string id;
  ConflictKind kind;
  std::string detail;
};

struct Reconciliation {
  std::vector<OutcomeRecord> records;    // in send order
  std::vector<ConflictRecord> conflicts;  // sent ids first, then unknown ids
};

class IncompleteSessionError : public Error {
 public:
  IncompleteSessionError(std::vector<std::string> pending, Reconciliation partial);
  const std::vector<std::string>& pending() const { return pending_; }
  const Reconciliation& partial() const { return partial_; }

 private:
  std::vector<std::string> pending_;
  Reconciliation partial_;
};

// One OutcomeRecord per cleanly observed sent id. Ids seen on neither stream
// become PreFiltered once session_end - sent_at >= timeout; earlier than
// that they are pending and the call throws IncompleteSessionError. Protocol
// violations are returned as ConflictRecords, never resolved silently.
Reconciliation reconcile(const RawLogs& logs, Duration timeout, std::string_view run_id = {});

// Run-log line format (one JSON object per record).
std::string ToJsonLine(const OutcomeRecord& r, bool include_latency = true);
OutcomeRecord ParseRecordLine(std::string_view line);
std::string ToJsonLine(const ConflictRecord& c);

void WriteRecords(std::ostream& out, const std::vector<OutcomeRecord>& records);
std::vector<OutcomeRecord> ReadRecords(std::istream& in);

}  // namespace modaudit

#endif  // MODAUDIT_RECONCILER_H_
