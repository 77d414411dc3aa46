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

#ifndef HYSCHED_EVENT_QUEUE_H_
#define HYSCHED_EVENT_QUEUE_H_

#include <cstdint>
#include <queue>
#include <vector>

#include "absl/status/status.h"
#include "hysched/sim_time.h"
#include "hysched/task.h"

namespace hysched {

enum class EventKind : uint8_t {
  kArrival,
  kSliceExpiry,
  kLimitExpiry,
  kCompletion,
  kMonitorTick,
};

const char* EventKindName(EventKind kind);

struct Event {
  SimTime at;
  uint64_t seq = 0;  // assigned by EventQueue::Push
  EventKind kind = EventKind::kMonitorTick;
  CoreId core = kNoCore;
  TaskId task = -1;
  // Core occupancy epoch at scheduling time; timer events whose epoch no
  // longer matches the core are stale and dropped.
  uint64_t epoch = 0;
};

// Min-heap on (at, seq) with a virtual clock that advances on Pop.
class EventQueue {
 public:
  // Fails if ev.at precedes the clock.
  absl::Status Push(Event ev);

  bool empty() const { return heap_.empty(); }
  size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }
  SimTime now() const { return now_; }

  // Removes the earliest event and moves the clock to its timestamp.
  Event Pop();

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      // Monitor ticks observe an instant only after everything else at that
      // instant, so a sample or migration never sees a task that has just
      // run out of work but not yet completed.
      const bool a_tick = a.kind == EventKind::kMonitorTick;
      const bool b_tick = b.kind == EventKind::kMonitorTick;
      if (a_tick != b_tick) return a_tick;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  uint64_t next_seq_ = 0;
  SimTime now_;
};

}  // namespace hysched

#endif  // HYSCHED_EVENT_QUEUE_H_
