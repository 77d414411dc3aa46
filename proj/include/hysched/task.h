// Copyright 2026 The hysched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HYSCHED_TASK_H_
#define HYSCHED_TASK_H_

#include <cstdint>
#include <optional>

#include "hysched/sim_time.h"

namespace hysched {

using TaskId = int64_t;
using CoreId = int32_t;

inline constexpr CoreId kNoCore = -1;

// Which core group currently owns a task or a core. Single-policy runs tag
// everything kNone.
enum class GroupTag : uint8_t { kNone = 0, kFifo = 1, kCfs = 2 };

const char* GroupTagName(GroupTag tag);

// One function invocation and its lifecycle timestamps.
struct Task {
  TaskId id = 0;
  SimTime arrival;
  SimTime demand;     // total CPU service required
  SimTime remaining;  // service still owed
  int32_t memory_mb = 128;
  std::optional<SimTime> first_run;
  std::optional<SimTime> completion;
  int64_t preemptions = 0;
  SimTime vruntime;
  GroupTag group = GroupTag::kNone;

  bool done() const { return completion.has_value(); }
};

// Constructs a task that has not been scheduled yet.
inline Task MakeTask(TaskId id, SimTime arrival, SimTime demand,
                     int32_t memory_mb = 128) {
  Task t;
  t.id = id;
  t.arrival = arrival;
  t.demand = demand;
  t.remaining = demand;
  t.memory_mb = memory_mb;
  return t;
}

}  // namespace hysched

#endif  // HYSCHED_TASK_H_
