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

#ifndef HYSCHED_HYBRID_H_
#define HYSCHED_HYBRID_H_

#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "absl/status/status.h"
#include "hysched/adaptation.h"
#include "hysched/cfs_group.h"
#include "hysched/engine.h"
#include "hysched/policy.h"

namespace hysched {

// Steps of a core migration between groups, reported to an observer after
// each one completes.
enum class MigrationStep { kLock, kPreempt, kMigrate, kTransition, kUnlock };

const char* MigrationStepName(MigrationStep step);

class HybridScheduler;
using MigrationObserver =
    std::function<void(MigrationStep, const HybridScheduler&, const Machine&)>;

// Two core groups. Every arrival enters the FIFO group's global queue and
// runs uninterrupted until it completes or has held its core for the
// preemption limit; in the latter case it is handed, once, to the CFS group,
// spreading handoffs round-robin over the CFS cores.
//
// Optional extensions: the limit follows a percentile of recent execution
// durations, and cores move between groups when their windowed average
// utilizations drift apart.
class HybridScheduler : public Scheduler {
 public:
  HybridScheduler(const PolicyConfig& config, int num_cores);

  absl::string_view name() const override { return "hybrid"; }
  absl::Status Init(Machine& m) override;
  void OnArrival(Machine& m, TaskId task) override;
  void OnTimer(Machine& m, CoreId core, EventKind kind) override;
  void OnCompletion(Machine& m, CoreId core, TaskId task) override;
  void OnMonitorTick(Machine& m) override;

  // Moves core c from the CFS group to the FIFO group: lock, preempt the
  // running task onto the least-loaded CFS core, spread the queue over the
  // remaining CFS cores, flip membership, unlock.
  absl::Status MigrateCfsToFifo(Machine& m, CoreId c,
                                const MigrationObserver& observer = {});

  // Moves core c from the FIFO group to the CFS group. A running task goes
  // back to the head of the FIFO queue; the CFS queues are then rebalanced
  // onto the new member.
  absl::Status MigrateFifoToCfs(Machine& m, CoreId c,
                                const MigrationObserver& observer = {});

  SimTime current_limit() const;
  const std::vector<CoreId>& fifo_members() const { return fifo_members_; }
  const CfsGroup& cfs_group() const { return cfs_; }
  const std::deque<TaskId>& fifo_queue() const { return fifo_queue_; }
  const std::optional<DurationWindow>& window() const { return window_; }

  // Every task that has arrived and not finished: queued anywhere or
  // running. Sorted.
  std::vector<TaskId> InFlight(const Machine& m) const;

 private:
  bool IsFifo(CoreId c) const;
  void RunFifoHead(Machine& m, CoreId c, bool after_switch);
  void FillIdleFifo(Machine& m);
  void HandleLimitExpiry(Machine& m, CoreId c);
  void MaybeRightsize(Machine& m);
  int min_group() const;

  PolicyConfig config_;
  std::vector<CoreId> fifo_members_;  // ascending
  std::deque<TaskId> fifo_queue_;
  CfsGroup cfs_;
  std::optional<DurationWindow> window_;

  std::vector<SimTime> busy_at_check_;
  SimTime last_check_;
  std::optional<SimTime> last_migration_;
};

}  // namespace hysched

#endif  // HYSCHED_HYBRID_H_
