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

#include "hysched/engine.h"

#include <algorithm>
#include <limits>
#include <utility>

#include "absl/strings/str_cat.h"

namespace hysched {
namespace {

constexpr size_t kNoSpan = std::numeric_limits<size_t>::max();

}  // namespace

std::vector<Task> TasksFromWorkload(const WorkloadSpec& workload) {
  std::vector<Task> tasks;
  tasks.reserve(workload.entries.size());
  SimTime t;
  for (size_t i = 0; i < workload.entries.size(); ++i) {
    const WorkloadEntry& e = workload.entries[i];
    t += e.iat;
    tasks.push_back(MakeTask(static_cast<TaskId>(i), t, e.demand, e.memory_mb));
  }
  return tasks;
}

Machine::Machine(std::vector<Task> tasks, int num_cores,
                 const SimOptions& options)
    : tasks_(std::move(tasks)),
      options_(options),
      open_span_(static_cast<size_t>(num_cores), kNoSpan) {
  cores_.resize(static_cast<size_t>(num_cores));
  for (int i = 0; i < num_cores; ++i) cores_[static_cast<size_t>(i)].id = i;
}

void Machine::Sync(CoreId c) {
  Core& core = this->core(c);
  if (!core.running) return;
  const SimTime now = this->now();
  if (now <= core.run_start) return;
  const SimTime ran = now - core.run_start;
  Task& t = task(*core.running);
  t.remaining -= ran;
  core.busy += ran;
  core.armed_service += ran;
  core.run_start = now;
}

void Machine::SyncAll() {
  for (const Core& c : cores_) Sync(c.id);
}

void Machine::Arm(CoreId c, SimTime budget, EventKind expiry) {
  Core& core = this->core(c);
  ++core.epoch;
  core.armed_service = SimTime::Zero();
  const Task& t = task(*core.running);
  Event ev;
  ev.core = c;
  ev.task = t.id;
  ev.epoch = core.epoch;
  if (t.remaining <= budget) {
    ev.kind = EventKind::kCompletion;
    ev.at = core.run_start + t.remaining;
  } else {
    ev.kind = expiry;
    ev.at = core.run_start + budget;
  }
  absl::Status s = queue_.Push(ev);
  if (!s.ok() && error_.ok()) error_ = s;
}

void Machine::Dispatch(CoreId c, TaskId id, SimTime budget, EventKind expiry,
                       bool after_switch) {
  Core& core = this->core(c);
  if (core.running || core.locked) {
    if (error_.ok()) {
      error_ = absl::InternalError(absl::StrCat("dispatch of task ", id, " to ",
                                                core.locked ? "locked" : "busy",
                                                " core ", c));
    }
    return;
  }
  Task& t = task(id);
  const SimTime overhead = after_switch ? switch_overhead_ : SimTime::Zero();
  core.overhead += overhead;
  core.running = id;
  core.run_start = now() + overhead;
  if (!t.first_run) t.first_run = core.run_start;
  t.group = core.group;
  if (options_.record_trace) {
    open_span_[static_cast<size_t>(c)] = trace_.size();
    trace_.push_back({id, c, core.run_start, core.run_start});
  }
  Arm(c, budget, expiry);
}

void Machine::Continue(CoreId c, SimTime budget, EventKind expiry) {
  if (!core(c).running) return;
  Sync(c);
  Arm(c, budget, expiry);
}

void Machine::CloseSpan(CoreId c) {
  size_t& idx = open_span_[static_cast<size_t>(c)];
  if (idx == kNoSpan) return;
  trace_[idx].end = std::max(trace_[idx].start, now());
  idx = kNoSpan;
}

TaskId Machine::Preempt(CoreId c, PreemptReason reason) {
  Sync(c);
  Core& core = this->core(c);
  const TaskId id = *core.running;
  Task& t = task(id);
  ++t.preemptions;
  if (reason == PreemptReason::kLimit) {
    ++core.limit_expiries;
  } else {
    ++core.preemption_count;
  }
  if (options_.record_trace) CloseSpan(c);
  core.running.reset();
  ++core.epoch;
  return id;
}

absl::Status Machine::CheckInvariants() const {
  SimTime busy;
  for (const Core& c : cores_) {
    busy += c.busy;
    if (c.busy > now()) {
      return absl::InternalError(
          absl::StrCat("core ", c.id, " busy beyond elapsed time"));
    }
  }
  SimTime served;
  std::vector<CoreId> owner(tasks_.size(), kNoCore);
  for (const Core& c : cores_) {
    if (!c.running) continue;
    CoreId& o = owner[static_cast<size_t>(*c.running)];
    if (o != kNoCore) {
      return absl::InternalError(absl::StrCat(
          "task ", *c.running, " running on cores ", o, " and ", c.id));
    }
    o = c.id;
  }
  for (const Task& t : tasks_) {
    if (t.remaining < SimTime::Zero() || t.remaining > t.demand) {
      return absl::InternalError(
          absl::StrCat("task ", t.id, " remaining out of range"));
    }
    // A task can reach zero remaining a moment before its completion event
    // pops (another event at the same instant synced it), but only while it
    // still holds its core.
    const bool zero = t.remaining == SimTime::Zero();
    if ((t.completion && !zero) ||
        (zero && !t.completion &&
         owner[static_cast<size_t>(t.id)] == kNoCore)) {
      return absl::InternalError(
          absl::StrCat("task ", t.id, " completion/remaining mismatch"));
    }
    served += t.demand - t.remaining;
  }
  if (served != busy) {
    return absl::InternalError(absl::StrCat("busy time ", busy.micros(),
                                            "us != service delivered ",
                                            served.micros(), "us"));
  }
  return absl::OkStatus();
}

absl::StatusOr<SimulationResult> Simulate(const WorkloadSpec& workload,
                                          Scheduler& scheduler, int num_cores,
                                          const SimOptions& options) {
  if (num_cores < 1) {
    return absl::InvalidArgumentError("need at least one core");
  }
  if (options.monitor_period.micros() <= 0) {
    return absl::InvalidArgumentError("monitor period must be positive");
  }
  Machine m(TasksFromWorkload(workload), num_cores, options);
  if (absl::Status s = scheduler.Init(m); !s.ok()) return s;

  const size_t n = m.tasks_.size();
  size_t next_arrival = 0;
  size_t completed = 0;
  SimTime last_completion;
  auto push_arrival = [&]() {
    if (next_arrival >= n) return;
    Event ev;
    ev.kind = EventKind::kArrival;
    ev.task = static_cast<TaskId>(next_arrival);
    ev.at = m.tasks_[next_arrival].arrival;
    ++next_arrival;
    absl::Status s = m.queue_.Push(ev);
    if (!s.ok() && m.error_.ok()) m.error_ = s;
  };

  std::vector<SimTime> busy_at_tick(static_cast<size_t>(num_cores));
  SimTime tick_start;
  SimulationResult result;
  if (n > 0) {
    push_arrival();
    Event tick;
    tick.kind = EventKind::kMonitorTick;
    tick.at = options.monitor_period;
    (void)m.queue_.Push(tick);
  }

  while (!m.queue_.empty() && m.error_.ok()) {
    if (options.horizon && m.queue_.top().at > *options.horizon) break;
    const Event ev = m.queue_.Pop();
    ++result.events;
    switch (ev.kind) {
      case EventKind::kArrival:
        push_arrival();
        scheduler.OnArrival(m, ev.task);
        break;
      case EventKind::kSliceExpiry:
      case EventKind::kLimitExpiry:
      case EventKind::kCompletion: {
        Core& core = m.core(ev.core);
        if (core.epoch != ev.epoch || !core.running) break;  // stale
        m.Sync(ev.core);
        if (ev.kind == EventKind::kCompletion) {
          Task& t = m.task(ev.task);
          if (t.remaining != SimTime::Zero()) {
            m.error_ = absl::InternalError(absl::StrCat(
                "completion of task ", t.id, " with work remaining"));
            break;
          }
          t.completion = m.now();
          if (options.record_trace) m.CloseSpan(ev.core);
          core.running.reset();
          ++core.epoch;
          ++completed;
          last_completion = m.now();
          scheduler.OnCompletion(m, ev.core, ev.task);
        } else {
          const uint64_t epoch = core.epoch;
          scheduler.OnTimer(m, ev.core, ev.kind);
          if (core.running && core.epoch == epoch && m.error_.ok()) {
            m.error_ = absl::InternalError(
                absl::StrCat(std::string(scheduler.name()), " left core ",
                             ev.core, " running without a timer"));
          }
        }
        break;
      }
      case EventKind::kMonitorTick: {
        m.SyncAll();
        absl::StatusOr<UtilizationSample> sample = SampleUtilization(
            m.cores_, busy_at_tick, tick_start, m.now() - tick_start);
        if (!sample.ok()) return sample.status();
        result.utilization.push_back(*std::move(sample));
        for (const Core& c : m.cores_) {
          busy_at_tick[static_cast<size_t>(c.id)] = c.busy;
        }
        tick_start = m.now();
        scheduler.OnMonitorTick(m);
        if (completed < n && m.queue_.empty()) {
          m.error_ = absl::InternalError(
              absl::StrCat(std::string(scheduler.name()), " stranded ",
                           n - completed, " tasks with no pending events"));
          break;
        }
        if (completed < n) {
          Event tick;
          tick.kind = EventKind::kMonitorTick;
          tick.at = m.now() + options.monitor_period;
          (void)m.queue_.Push(tick);
        }
        break;
      }
    }
    if (options.check_invariants && m.error_.ok()) {
      m.error_ = m.CheckInvariants();
    }
  }
  if (!m.error_.ok()) return m.error_;

  m.SyncAll();
  if (options.record_trace) {
    for (const Core& c : m.cores_) m.CloseSpan(c.id);
  }
  // A drained run ends at its last completion, not at the trailing tick.
  result.end_time = completed == n ? last_completion : m.now();
  result.censored = static_cast<int64_t>(n - completed);
  result.tasks = std::move(m.tasks_);
  result.cores = std::move(m.cores_);
  result.groups = std::move(m.groups_);
  result.migrations = std::move(m.migrations_);
  result.trace = std::move(m.trace_);
  return result;
}

}  // namespace hysched
