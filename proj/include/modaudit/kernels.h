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

#ifndef MODAUDIT_KERNELS_H_
#define MODAUDIT_KERNELS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "modaudit/core.h"
#include "modaudit/datasets.h"
#include "modaudit/metrics.h"
#include "modaudit/moderation.h"

// Batch kernels. Each parallel kernel has a serial twin with identical
// results; tests compare the two.
namespace modaudit::kernels {

int MaxThreads();

std::vector<Outcome> ModerateBatch(std::span<const std::string> texts, const ChannelState& state);
std::vector<Outcome> ModerateBatchSerial(std::span<const std::string> texts,
                                         const ChannelState& state);

ConfusionCounts TallyConfusion(std::span<const ScoredRecord> records);
ConfusionCounts TallyConfusionSerial(std::span<const ScoredRecord> records);

// Size of each named subset (criterion or community) of `messages`.
std::vector<std::size_t> CountSubsets(std::span<const Message> messages, const MappingTable& table,
                                      std::span<const std::string> names);
std::vector<std::size_t> CountSubsetsSerial(std::span<const Message> messages,
                                            const MappingTable& table,
                                            std::span<const std::string> names);

}  // namespace modaudit::kernels

#endif  // MODAUDIT_KERNELS_H_
