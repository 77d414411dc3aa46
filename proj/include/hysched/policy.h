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

#ifndef HYSCHED_POLICY_H_
#define HYSCHED_POLICY_H_

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "hysched/event_queue.h"
#include "hysched/sim_time.h"
#include "hysched/task.h"

namespace hysched {

class Machine;

enum class PolicyKind { kFifo, kFifoPreempt, kCfs, kRr, kEdf, kHybrid };

const char* PolicyKindName(PolicyKind kind);
absl::StatusOr<PolicyKind> ParsePolicyKind(absl::string_view name);

// Sliding-window adaptation of the hybrid preemption limit.
struct AdaptConfig {
  bool enabled = false;
  double percentile = 95.0;
  int window = 100;
};

// Core-group rightsizing for the hybrid scheduler.
struct RightsizeConfig {
  bool enabled = false;
  double util_threshold = 0.20;
  SimTime check_period = Seconds(1);
  int min_group_size = 1;
  SimTime cooldown = Seconds(2);
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kFifo;
  // RR quantum; CFS target latency.
  SimTime slice = Millis(6);
  SimTime min_granularity = Micros(750);
  // FIFO_PREEMPT tau; initial FIFO-group limit for HYBRID.
  SimTime preempt_limit = Millis(100);
  // Charged to the core on every involuntary switch.
  SimTime ctx_switch_overhead = Micros(5);
  // EDF deadline = arrival + offset.
  SimTime deadline_offset = Seconds(1);

  // HYBRID only.
  int fifo_cores = 25;
  int cfs_cores = 25;
  AdaptConfig adapt;
  RightsizeConfig rightsize;

  // Kind-specific defaults (hybrid starts at a 1,633 ms limit).
  static PolicyConfig Defaults(PolicyKind kind);

  absl::Status Validate(int enclave_cores) const;
};

// A scheduling policy driven by the simulation engine. Every callback runs
// on the single simulation thread; the machine is the only way to act.
class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual absl::string_view name() const = 0;

  // Called once before the first event. Cores exist but are all idle.
  virtual absl::Status Init(Machine& m) = 0;

  virtual void OnArrival(Machine& m, TaskId task) = 0;

  // A slice or limit timer fired on a running core. The task's progress has
  // been accounted; the policy must either Continue or Preempt it.
  virtual void OnTimer(Machine& m, CoreId core, EventKind kind) = 0;

  // The task finished; the core is already idle.
  virtual void OnCompletion(Machine& m, CoreId core, TaskId task) = 0;

  virtual void OnMonitorTick(Machine&) {}
};

absl::StatusOr<std::unique_ptr<Scheduler>> MakeScheduler(
    const PolicyConfig& config, int num_cores);

// EDF with caller-chosen deadlines. MakeScheduler uses arrival + offset,
// under which a later arrival never has an earlier deadline.
using DeadlineFn = std::function<SimTime(const Task&)>;
std::unique_ptr<Scheduler> MakeEdfScheduler(const PolicyConfig& config,
                                            DeadlineFn deadline);

}  // namespace hysched

#endif  // HYSCHED_POLICY_H_
