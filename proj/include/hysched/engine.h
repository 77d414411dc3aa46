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

#ifndef HYSCHED_ENGINE_H_
#define HYSCHED_ENGINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "hysched/adaptation.h"
#include "hysched/core.h"
#include "hysched/event_queue.h"
#include "hysched/policy.h"
#include "hysched/task.h"
#include "hysched/workload.h"

namespace hysched {

enum class PreemptReason { kSlice, kLimit, kMigration, kDeadline };

struct SimOptions {
  std::optional<SimTime> horizon;  // unset: run until drained
  SimTime monitor_period = Millis(100);
  // Verifies conservation and exclusivity after every event. O(n) per event.
  bool check_invariants = false;
  bool record_trace = false;
};

// One service interval of a task on a core.
// A maximal interval of uninterrupted service; a re-armed timer does not
// split it.
struct TraceSpan {
  TaskId task = 0;
  CoreId core = 0;
  SimTime start;
  SimTime end;
};

// Per-tick hybrid state: current limit and group sizes.
struct GroupSample {
  SimTime at;
  SimTime limit;
  int fifo_cores = 0;
  int cfs_cores = 0;
};

struct MigrationRecord {
  SimTime at;
  CoreId core = 0;
  GroupTag from = GroupTag::kNone;
  GroupTag to = GroupTag::kNone;
};

struct SimulationResult {
  std::vector<Task> tasks;
  std::vector<Core> cores;
  std::vector<UtilizationSample> utilization;
  std::vector<GroupSample> groups;
  std::vector<MigrationRecord> migrations;
  std::vector<TraceSpan> trace;
  SimTime end_time;
  int64_t censored = 0;
  int64_t events = 0;

  bool drained() const { return censored == 0; }
};

// Engine state exposed to scheduling policies.
class Machine {
 public:
  Machine(std::vector<Task> tasks, int num_cores, const SimOptions& options);

  SimTime now() const { return queue_.now(); }
  int num_cores() const { return static_cast<int>(cores_.size()); }

  Task& task(TaskId id) { return tasks_[static_cast<size_t>(id)]; }
  const Task& task(TaskId id) const { return tasks_[static_cast<size_t>(id)]; }
  Core& core(CoreId id) { return cores_[static_cast<size_t>(id)]; }
  const Core& core(CoreId id) const { return cores_[static_cast<size_t>(id)]; }
  std::span<const Core> cores() const { return cores_; }

  bool idle(CoreId c) const { return !core(c).running.has_value(); }

  // Starts `task` on an idle, unlocked core. The timer fires as a
  // completion if the remaining demand fits in `budget`, otherwise as
  // `expiry`. With `after_switch`, service starts after the configured
  // switch overhead.
  void Dispatch(CoreId c, TaskId task, SimTime budget, EventKind expiry,
                bool after_switch);

  // Re-arms the running task's timer for another budget.
  void Continue(CoreId c, SimTime budget, EventKind expiry);

  // Stops the running task, accounting its progress.
  TaskId Preempt(CoreId c, PreemptReason reason);

  // Service the running task received since its timer was last armed.
  SimTime ArmedService(CoreId c) const { return core(c).armed_service; }

  void set_switch_overhead(SimTime t) { switch_overhead_ = t; }

  void RecordGroups(GroupSample sample) { groups_.push_back(sample); }
  void RecordMigration(MigrationRecord rec) { migrations_.push_back(rec); }

  // Brings busy/remaining counters of every running core up to now.
  void SyncAll();

  absl::Status CheckInvariants() const;

 private:
  friend absl::StatusOr<SimulationResult> Simulate(const WorkloadSpec&,
                                                   Scheduler&, int,
                                                   const SimOptions&);

  void Sync(CoreId c);
  void Arm(CoreId c, SimTime budget, EventKind expiry);
  void CloseSpan(CoreId c);

  std::vector<Task> tasks_;
  std::vector<Core> cores_;
  EventQueue queue_;
  SimOptions options_;
  SimTime switch_overhead_;
  absl::Status error_;
  std::vector<GroupSample> groups_;
  std::vector<MigrationRecord> migrations_;
  std::vector<TraceSpan> trace_;
  std::vector<size_t> open_span_;  // per core index into trace_, or npos
};

// Runs `workload` to drain (or to the horizon) under `scheduler`.
absl::StatusOr<SimulationResult> Simulate(const WorkloadSpec& workload,
                                          Scheduler& scheduler, int num_cores,
                                          const SimOptions& options = {});

// Builds the task list (ids in file order, arrivals from cumulative IATs).
std::vector<Task> TasksFromWorkload(const WorkloadSpec& workload);

}  // namespace hysched

#endif  // HYSCHED_ENGINE_H_
