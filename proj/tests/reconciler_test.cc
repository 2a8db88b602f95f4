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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fuzz_logs.h"

namespace modaudit {
namespace {

using namespace std::chrono_literals;

EventEntry Event(std::string id, Duration at) {
  EventEntry e;
  e.id = std::move(id);
  e.text = "x";
  e.category = ModerationCategory::Racism();
  e.topics = {"RER"};
  e.fragments = {"frag"};
  e.level = FilterLevel(2);
  e.received_at = at;
  return e;
}

RawLogs ThreeMessages() {
  RawLogs logs;
  logs.sent = {{"m1", "a", 0s, 0s}, {"m2", "b", 4s, 4s}, {"m3", "c", 8s, 8s}};
  logs.echoes = {{"m1", "a", 1s}};
  logs.events = {Event("m2", 5s)};
  logs.session_end = 20s;
  return logs;
}

TEST(Reconcile, OnePerOutcome) {
  auto rec = reconcile(ThreeMessages(), 10s, "r1");
  ASSERT_EQ(rec.records.size(), 3u);
  EXPECT_TRUE(rec.conflicts.empty());
  EXPECT_TRUE(std::holds_alternative<Passed>(rec.records[0].outcome));
  const auto& m = std::get<Moderated>(rec.records[1].outcome);
  EXPECT_EQ(m.category, ModerationCategory::Racism());
  EXPECT_EQ(m.level.value(), 2);
  EXPECT_TRUE(std::holds_alternative<PreFiltered>(rec.records[2].outcome));
  EXPECT_EQ(rec.records[0].latency, Duration(1s));
  EXPECT_FALSE(rec.records[2].latency);
  EXPECT_EQ(rec.records[1].run_id, "r1");
}

TEST(Reconcile, EmptyLogs) {
  auto rec = reconcile(RawLogs{}, 10s);
  EXPECT_TRUE(rec.records.empty());
  EXPECT_TRUE(rec.conflicts.empty());
}

TEST(Reconcile, BothStreamsIsConflict) {
  RawLogs logs;
  logs.sent = {{"m1", "a", 0s, 0s}};
  logs.echoes = {{"m1", "a", 1s}};
  logs.events = {Event("m1", 1s)};
  logs.session_end = 20s;
  auto rec = reconcile(logs, 10s);
  EXPECT_TRUE(rec.records.empty());
  ASSERT_EQ(rec.conflicts.size(), 1u);
  EXPECT_EQ(rec.conflicts[0].kind, ConflictKind::kBothStreams);
}

TEST(Reconcile, TimeoutBoundaryIsInclusive) {
  RawLogs logs;
  logs.sent = {{"m1", "a", 0s, 0s}};
  logs.session_end = 10s;
  auto rec = reconcile(logs, 10s);
  ASSERT_EQ(rec.records.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<PreFiltered>(rec.records[0].outcome));
}

TEST(Reconcile, PendingThrowsWithPartial) {
  RawLogs logs = ThreeMessages();
  logs.session_end = 9s;
  try {
    reconcile(logs, 10s);
    FAIL() << "expected IncompleteSessionError";
  } catch (const IncompleteSessionError& e) {
    EXPECT_EQ(e.pending(), std::vector<std::string>{"m3"});
    EXPECT_EQ(e.partial().records.size(), 2u);
  }
}

TEST(Reconcile, UnknownAndEarlyObservations) {
  RawLogs logs;
  logs.sent = {{"m1", "a", 5s, 5s}};
  logs.echoes = {{"m1", "a", 4s}, {"ghost", "g", 1s}};
  logs.session_end = 20s;
  auto rec = reconcile(logs, 10s);
  EXPECT_TRUE(rec.records.empty());
  ASSERT_EQ(rec.conflicts.size(), 2u);
  EXPECT_EQ(rec.conflicts[0].kind, ConflictKind::kObservedBeforeSend);
  EXPECT_EQ(rec.conflicts[1].kind, ConflictKind::kUnknownId);
  EXPECT_EQ(rec.conflicts[1].id, "ghost");
}

TEST(Reconcile, EventWithoutFragmentsKeepsText) {
  RawLogs logs;
  logs.sent = {{"m1", "whole text", 0s, 0s}};
  auto e = Event("m1", 1s);
  e.text = "whole text";
  e.fragments.clear();
  logs.events = {e};
  logs.session_end = 1s;
  auto rec = reconcile(logs, 10s);
  EXPECT_EQ(std::get<Moderated>(rec.records[0].outcome).fragments,
            std::vector<std::string>{"whole text"});
}

TEST(ReconcileFuzz, EverySentIdAccountedFor) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    auto c = fuzz::Make(rng);
    const std::string err = fuzz::Check(c);
    ASSERT_TRUE(err.empty()) << "case " << i << ": " << err;
  }
}

TEST(ReconcileFuzz, StableUnderStreamPermutation) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto c = fuzz::Make(rng);
    c.logs.session_end += c.timeout;  // nothing pending
    auto a = reconcile(c.logs, c.timeout);
    std::shuffle(c.logs.echoes.begin(), c.logs.echoes.end(), rng);
    std::shuffle(c.logs.events.begin(), c.logs.events.end(), rng);
    auto b = reconcile(c.logs, c.timeout);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      EXPECT_EQ(ToJsonLine(a.records[k]), ToJsonLine(b.records[k]));
    }
    std::set<std::string> ca, cb;
    for (const auto& x : a.conflicts) ca.insert(ToJsonLine(x));
    for (const auto& x : b.conflicts) cb.insert(ToJsonLine(x));
    EXPECT_EQ(ca, cb);
  }
}

TEST(ReconcileFuzz, Idempotent) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    auto c = fuzz::Make(rng);
    c.logs.session_end += c.timeout;
    auto a = reconcile(c.logs, c.timeout);
    auto b = reconcile(c.logs, c.timeout);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      EXPECT_EQ(ToJsonLine(a.records[k]), ToJsonLine(b.records[k]));
    }
  }
}

TEST(RecordLines, RoundTrip) {
  auto rec = reconcile(ThreeMessages(), 10s, "run");
  std::stringstream ss;
  WriteRecords(ss, rec.records);
  auto back = ReadRecords(ss);
  ASSERT_EQ(back.size(), rec.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, rec.records[i].id);
    EXPECT_EQ(back[i].outcome, rec.records[i].outcome);
    EXPECT_EQ(back[i].latency, rec.records[i].latency);
    EXPECT_EQ(back[i].run_id, "run");
  }
}

TEST(RecordLines, BadLine) {
  EXPECT_THROW(ParseRecordLine("{"), ValidationError);
  EXPECT_THROW(ParseRecordLine(R"({"id":"a","outcome":"lost"})"), ValidationError);
}

}  // namespace
}  // namespace modaudit
