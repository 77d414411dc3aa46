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

#ifndef HYSCHED_CFS_GROUP_H_
#define HYSCHED_CFS_GROUP_H_

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "hysched/engine.h"
#include "hysched/policy.h"

namespace hysched {

// Per-core CFS runqueues over a set of member cores. The running task is
// not kept in its core's queue; it is re-inserted when its slice expires.
class CfsGroup {
 public:
  CfsGroup(const PolicyConfig& config, int num_cores);

  void AddCore(CoreId c);
  // The core's queue must already be empty.
  void RemoveCore(CoreId c);
  bool contains(CoreId c) const;
  // Ascending core ids.
  const std::vector<CoreId>& members() const { return members_; }

  size_t queued(CoreId c) const { return rq_[static_cast<size_t>(c)].size(); }
  // Queued plus running.
  int Load(const Machine& m, CoreId c) const;

  // Unlocked member with the fewest runnable tasks, lowest id on ties.
  CoreId LeastLoaded(const Machine& m) const;
  // Next unlocked member after the round-robin cursor.
  CoreId NextRoundRobin(const Machine& m);

  // Smallest vruntime among the core's queued and running tasks.
  std::optional<SimTime> MinVruntime(const Machine& m, CoreId c) const;

  // Joins `task` to core c at no less than the queue's minimum vruntime and
  // runs it at once if the core is idle.
  void Place(Machine& m, CoreId c, TaskId task);

  // max(target_latency / nr_running, min_granularity).
  SimTime Quantum(CoreId c) const;

  void OnSliceExpiry(Machine& m, CoreId c);
  // Runs the minimum-vruntime queued task on an idle core.
  void DispatchNext(Machine& m, CoreId c, bool after_switch);

  // Stops the running task mid-slice and charges its vruntime.
  TaskId PreemptRunning(Machine& m, CoreId c, PreemptReason reason);

  // Empties core c's queue, returning tasks in vruntime order.
  std::vector<TaskId> Drain(CoreId c);

  // Moves queued tasks from the most to the least loaded unlocked members
  // until their loads differ by at most one. A locked `staged` member takes
  // part too; tasks moved there only queue until it is unlocked.
  void Rebalance(Machine& m, CoreId staged = kNoCore);

  std::vector<TaskId> Queued(CoreId c) const;

 private:
  using Key = std::pair<int64_t, TaskId>;  // (vruntime, id)

  Key KeyOf(const Machine& m, TaskId t) const;
  void Run(Machine& m, CoreId c, TaskId t, bool after_switch);

  SimTime target_latency_;
  SimTime min_granularity_;
  std::vector<std::set<Key>> rq_;
  std::vector<CoreId> members_;
  size_t rr_cursor_ = 0;
};

}  // namespace hysched

#endif  // HYSCHED_CFS_GROUP_H_
