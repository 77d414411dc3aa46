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

#include "hysched/hybrid.h"

#include <algorithm>

#include "absl/strings/str_cat.h"

namespace hysched {

const char* MigrationStepName(MigrationStep step) {
  switch (step) {
    case MigrationStep::kLock:
      return "lock";
    case MigrationStep::kPreempt:
      return "preempt";
    case MigrationStep::kMigrate:
      return "migrate";
    case MigrationStep::kTransition:
      return "transition";
    case MigrationStep::kUnlock:
      return "unlock";
  }
  return "unknown";
}

HybridScheduler::HybridScheduler(const PolicyConfig& config, int num_cores)
    : config_(config), cfs_(config, num_cores) {
  if (config_.adapt.enabled) {
    window_.emplace(config_.adapt.window, config_.adapt.percentile,
                    config_.preempt_limit);
  }
}

absl::Status HybridScheduler::Init(Machine& m) {
  if (config_.fifo_cores + config_.cfs_cores != m.num_cores()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "hybrid split ", config_.fifo_cores, "+", config_.cfs_cores,
        " does not cover ", m.num_cores(), " cores"));
  }
  m.set_switch_overhead(config_.ctx_switch_overhead);
  for (CoreId c = 0; c < m.num_cores(); ++c) {
    if (c < config_.fifo_cores) {
      fifo_members_.push_back(c);
      m.core(c).group = GroupTag::kFifo;
    } else {
      cfs_.AddCore(c);
      m.core(c).group = GroupTag::kCfs;
    }
  }
  busy_at_check_.assign(static_cast<size_t>(m.num_cores()), SimTime::Zero());
  return absl::OkStatus();
}

SimTime HybridScheduler::current_limit() const {
  return window_ ? window_->Limit() : config_.preempt_limit;
}

int HybridScheduler::min_group() const {
  return std::max(1, config_.rightsize.min_group_size);
}

bool HybridScheduler::IsFifo(CoreId c) const {
  return std::binary_search(fifo_members_.begin(), fifo_members_.end(), c);
}

void HybridScheduler::RunFifoHead(Machine& m, CoreId c, bool after_switch) {
  if (fifo_queue_.empty()) return;
  TaskId t = fifo_queue_.front();
  fifo_queue_.pop_front();
  m.Dispatch(c, t, current_limit(), EventKind::kLimitExpiry, after_switch);
}

void HybridScheduler::FillIdleFifo(Machine& m) {
  for (CoreId c : fifo_members_) {
    if (fifo_queue_.empty()) return;
    if (m.idle(c) && !m.core(c).locked) RunFifoHead(m, c, false);
  }
}

void HybridScheduler::OnArrival(Machine& m, TaskId task) {
  m.task(task).group = GroupTag::kFifo;
  fifo_queue_.push_back(task);
  FillIdleFifo(m);
}

void HybridScheduler::OnTimer(Machine& m, CoreId core, EventKind kind) {
  if (IsFifo(core)) {
    if (kind == EventKind::kLimitExpiry) {
      HandleLimitExpiry(m, core);
    } else {
      m.Continue(core, current_limit(), EventKind::kLimitExpiry);
    }
    return;
  }
  cfs_.OnSliceExpiry(m, core);
}

void HybridScheduler::HandleLimitExpiry(Machine& m, CoreId c) {
  TaskId t = m.Preempt(c, PreemptReason::kLimit);
  CoreId dest = cfs_.NextRoundRobin(m);
  cfs_.Place(m, dest, t);
  RunFifoHead(m, c, /*after_switch=*/true);
}

void HybridScheduler::OnCompletion(Machine& m, CoreId core, TaskId task) {
  if (window_) {
    const Task& t = m.task(task);
    window_->Push(*t.completion - *t.first_run);
  }
  if (IsFifo(core)) {
    RunFifoHead(m, core, false);
  } else {
    cfs_.DispatchNext(m, core, false);
  }
}

void HybridScheduler::OnMonitorTick(Machine& m) {
  m.RecordGroups({m.now(), current_limit(),
                  static_cast<int>(fifo_members_.size()),
                  static_cast<int>(cfs_.members().size())});
  if (config_.rightsize.enabled) MaybeRightsize(m);
}

void HybridScheduler::MaybeRightsize(Machine& m) {
  const SimTime elapsed = m.now() - last_check_;
  if (elapsed < config_.rightsize.check_period) return;
  auto group_avg = [&](const std::vector<CoreId>& cores) {
    if (cores.empty()) return 0.0;
    double sum = 0.0;
    for (CoreId c : cores) {
      SimTime busy = m.core(c).busy - busy_at_check_[static_cast<size_t>(c)];
      sum += static_cast<double>(busy.micros()) /
             static_cast<double>(elapsed.micros());
    }
    return sum / static_cast<double>(cores.size());
  };
  const double fifo_avg = group_avg(fifo_members_);
  const double cfs_avg = group_avg(cfs_.members());
  for (const Core& c : m.cores()) {
    busy_at_check_[static_cast<size_t>(c.id)] = c.busy;
  }
  last_check_ = m.now();

  const bool cooled = !last_migration_ ||
                      m.now() - *last_migration_ >= config_.rightsize.cooldown;
  RightsizeConfig cfg = config_.rightsize;
  cfg.min_group_size = min_group();
  RightsizeAction action = DecideRightsize(
      fifo_avg, cfs_avg, cfg, static_cast<int>(fifo_members_.size()),
      static_cast<int>(cfs_.members().size()), cooled);
  if (action == RightsizeAction::kNoOp) return;

  absl::Status s;
  if (action == RightsizeAction::kMoveToFifo) {
    // Cheapest CFS core to empty: fewest runnable tasks, highest id on ties.
    CoreId pick = kNoCore;
    int best = 0;
    for (CoreId c : cfs_.members()) {
      int load = cfs_.Load(m, c);
      if (pick == kNoCore || load <= best) {
        pick = c;
        best = load;
      }
    }
    s = MigrateCfsToFifo(m, pick);
  } else {
    // Prefer an idle FIFO core, highest id first.
    CoreId pick = fifo_members_.back();
    for (auto it = fifo_members_.rbegin(); it != fifo_members_.rend(); ++it) {
      if (m.idle(*it)) {
        pick = *it;
        break;
      }
    }
    s = MigrateFifoToCfs(m, pick);
  }
  if (s.ok()) last_migration_ = m.now();
}

absl::Status HybridScheduler::MigrateCfsToFifo(
    Machine& m, CoreId c, const MigrationObserver& observer) {
  if (!cfs_.contains(c)) {
    return absl::InvalidArgumentError(
        absl::StrCat("core ", c, " is not in the CFS group"));
  }
  if (static_cast<int>(cfs_.members().size()) <= min_group()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "refusing to migrate core ", c, ": CFS group at minimum size"));
  }
  auto notify = [&](MigrationStep step) {
    if (observer) observer(step, *this, m);
  };

  m.core(c).locked = true;
  notify(MigrationStep::kLock);

  if (!m.idle(c)) {
    TaskId t = cfs_.PreemptRunning(m, c, PreemptReason::kMigration);
    cfs_.Place(m, cfs_.LeastLoaded(m), t);
  }
  notify(MigrationStep::kPreempt);

  for (TaskId t : cfs_.Drain(c)) cfs_.Place(m, cfs_.LeastLoaded(m), t);
  cfs_.Rebalance(m);
  notify(MigrationStep::kMigrate);

  cfs_.RemoveCore(c);
  fifo_members_.insert(
      std::lower_bound(fifo_members_.begin(), fifo_members_.end(), c), c);
  m.core(c).group = GroupTag::kFifo;
  notify(MigrationStep::kTransition);

  m.core(c).locked = false;
  FillIdleFifo(m);
  notify(MigrationStep::kUnlock);

  m.RecordMigration({m.now(), c, GroupTag::kCfs, GroupTag::kFifo});
  return absl::OkStatus();
}

absl::Status HybridScheduler::MigrateFifoToCfs(
    Machine& m, CoreId c, const MigrationObserver& observer) {
  if (!IsFifo(c)) {
    return absl::InvalidArgumentError(
        absl::StrCat("core ", c, " is not in the FIFO group"));
  }
  if (static_cast<int>(fifo_members_.size()) <= min_group()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "refusing to migrate core ", c, ": FIFO group at minimum size"));
  }
  auto notify = [&](MigrationStep step) {
    if (observer) observer(step, *this, m);
  };

  m.core(c).locked = true;
  notify(MigrationStep::kLock);

  if (!m.idle(c)) {
    TaskId t = m.Preempt(c, PreemptReason::kMigration);
    fifo_queue_.push_front(t);
  }
  notify(MigrationStep::kPreempt);

  // The new runqueue is filled while the core is still locked; tasks moved
  // there wait for the unlock.
  fifo_members_.erase(
      std::lower_bound(fifo_members_.begin(), fifo_members_.end(), c));
  cfs_.AddCore(c);
  cfs_.Rebalance(m, /*staged=*/c);
  notify(MigrationStep::kMigrate);

  m.core(c).group = GroupTag::kCfs;
  notify(MigrationStep::kTransition);

  m.core(c).locked = false;
  cfs_.DispatchNext(m, c, false);
  FillIdleFifo(m);
  notify(MigrationStep::kUnlock);

  m.RecordMigration({m.now(), c, GroupTag::kFifo, GroupTag::kCfs});
  return absl::OkStatus();
}

std::vector<TaskId> HybridScheduler::InFlight(const Machine& m) const {
  std::vector<TaskId> out(fifo_queue_.begin(), fifo_queue_.end());
  for (CoreId c : cfs_.members()) {
    std::vector<TaskId> q = cfs_.Queued(c);
    out.insert(out.end(), q.begin(), q.end());
  }
  for (const Core& c : m.cores()) {
    if (c.running) out.push_back(*c.running);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hysched
