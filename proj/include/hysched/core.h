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

#ifndef HYSCHED_CORE_H_
#define HYSCHED_CORE_H_

#include <cstdint>
#include <optional>

#include "hysched/sim_time.h"
#include "hysched/task.h"

namespace hysched {

// A simulated CPU core.
struct Core {
  CoreId id = 0;
  GroupTag group = GroupTag::kNone;
  std::optional<TaskId> running;
  // Service delivered to tasks. Switch overhead is tracked separately so
  // that busy time always equals the service tasks received.
  SimTime busy;
  SimTime overhead;
  // Involuntary switches away from a task on this core (slice, deadline or
  // migration preemption). Limit expiries are counted on their own.
  int64_t preemption_count = 0;
  int64_t limit_expiries = 0;
  // Locked cores never receive new task assignments.
  bool locked = false;

  // Engine bookkeeping.
  uint64_t epoch = 0;
  SimTime run_start;      // service start of the running task, after overhead
  SimTime armed_service;  // service since the timer was last armed
};

}  // namespace hysched

#endif  // HYSCHED_CORE_H_
