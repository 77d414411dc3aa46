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

#include "hysched/cfs_group.h"

#include <algorithm>

namespace hysched {

CfsGroup::CfsGroup(const PolicyConfig& config, int num_cores)
    : target_latency_(config.slice),
      min_granularity_(config.min_granularity),
      rq_(static_cast<size_t>(num_cores)) {}

void CfsGroup::AddCore(CoreId c) {
  auto it = std::lower_bound(members_.begin(), members_.end(), c);
  if (it == members_.end() || *it != c) members_.insert(it, c);
}

void CfsGroup::RemoveCore(CoreId c) {
  auto it = std::lower_bound(members_.begin(), members_.end(), c);
  if (it != members_.end() && *it == c) members_.erase(it);
  if (rr_cursor_ >= members_.size()) rr_cursor_ = 0;
}

bool CfsGroup::contains(CoreId c) const {
  return std::binary_search(members_.begin(), members_.end(), c);
}

int CfsGroup::Load(const Machine& m, CoreId c) const {
  return static_cast<int>(queued(c)) + (m.idle(c) ? 0 : 1);
}

CoreId CfsGroup::LeastLoaded(const Machine& m) const {
  CoreId best = kNoCore;
  int best_load = 0;
  for (CoreId c : members_) {
    if (m.core(c).locked) continue;
    int load = Load(m, c);
    if (best == kNoCore || load < best_load) {
      best = c;
      best_load = load;
    }
  }
  return best;
}

CoreId CfsGroup::NextRoundRobin(const Machine& m) {
  for (size_t i = 0; i < members_.size(); ++i) {
    CoreId c = members_[rr_cursor_ % members_.size()];
    rr_cursor_ = (rr_cursor_ + 1) % members_.size();
    if (!m.core(c).locked) return c;
  }
  return kNoCore;
}

std::optional<SimTime> CfsGroup::MinVruntime(const Machine& m, CoreId c) const {
  std::optional<SimTime> min;
  const auto& q = rq_[static_cast<size_t>(c)];
  if (!q.empty()) min = SimTime(q.begin()->first);
  if (const auto& running = m.core(c).running) {
    SimTime v = m.task(*running).vruntime;
    if (!min || v < *min) min = v;
  }
  return min;
}

CfsGroup::Key CfsGroup::KeyOf(const Machine& m, TaskId t) const {
  return {m.task(t).vruntime.micros(), t};
}

void CfsGroup::Place(Machine& m, CoreId c, TaskId t) {
  Task& task = m.task(t);
  if (std::optional<SimTime> floor = MinVruntime(m, c);
      floor && task.vruntime < *floor) {
    task.vruntime = *floor;
  }
  task.group = GroupTag::kCfs;
  if (m.idle(c)) {
    Run(m, c, t, /*after_switch=*/false);
  } else {
    rq_[static_cast<size_t>(c)].insert(KeyOf(m, t));
  }
}

SimTime CfsGroup::Quantum(CoreId c) const {
  // The task about to run counts as runnable whether or not it is queued.
  int64_t nr = static_cast<int64_t>(queued(c)) + 1;
  SimTime q(target_latency_.micros() / nr);
  return std::max(q, min_granularity_);
}

void CfsGroup::Run(Machine& m, CoreId c, TaskId t, bool after_switch) {
  m.Dispatch(c, t, Quantum(c), EventKind::kSliceExpiry, after_switch);
}

void CfsGroup::DispatchNext(Machine& m, CoreId c, bool after_switch) {
  auto& q = rq_[static_cast<size_t>(c)];
  if (q.empty() || !m.idle(c) || m.core(c).locked) return;
  TaskId next = q.begin()->second;
  q.erase(q.begin());
  Run(m, c, next, after_switch);
}

void CfsGroup::OnSliceExpiry(Machine& m, CoreId c) {
  const TaskId t = *m.core(c).running;
  Task& task = m.task(t);
  task.vruntime += m.ArmedService(c);
  auto& q = rq_[static_cast<size_t>(c)];
  if (q.empty() || KeyOf(m, t) < *q.begin()) {
    m.Continue(c, Quantum(c), EventKind::kSliceExpiry);
    return;
  }
  m.Preempt(c, PreemptReason::kSlice);
  q.insert(KeyOf(m, t));
  DispatchNext(m, c, /*after_switch=*/true);
}

TaskId CfsGroup::PreemptRunning(Machine& m, CoreId c, PreemptReason reason) {
  TaskId t = m.Preempt(c, reason);
  m.task(t).vruntime += m.ArmedService(c);
  return t;
}

std::vector<TaskId> CfsGroup::Drain(CoreId c) {
  auto& q = rq_[static_cast<size_t>(c)];
  std::vector<TaskId> out;
  out.reserve(q.size());
  for (const Key& k : q) out.push_back(k.second);
  q.clear();
  return out;
}

void CfsGroup::Rebalance(Machine& m, CoreId staged) {
  while (true) {
    CoreId hi = kNoCore;
    CoreId lo = kNoCore;
    int hi_load = 0;
    int lo_load = 0;
    for (CoreId c : members_) {
      if (m.core(c).locked && c != staged) continue;
      int load = Load(m, c);
      if (hi == kNoCore || load > hi_load) {
        hi = c;
        hi_load = load;
      }
      if (lo == kNoCore || load < lo_load) {
        lo = c;
        lo_load = load;
      }
    }
    if (hi == kNoCore || hi_load - lo_load <= 1) return;
    auto& q = rq_[static_cast<size_t>(hi)];
    auto last = std::prev(q.end());
    TaskId t = last->second;
    q.erase(last);
    if (lo == staged) {
      Task& task = m.task(t);
      if (std::optional<SimTime> floor = MinVruntime(m, lo);
          floor && task.vruntime < *floor) {
        task.vruntime = *floor;
      }
      rq_[static_cast<size_t>(lo)].insert(KeyOf(m, t));
    } else {
      Place(m, lo, t);
    }
  }
}

std::vector<TaskId> CfsGroup::Queued(CoreId c) const {
  std::vector<TaskId> out;
  for (const Key& k : rq_[static_cast<size_t>(c)]) out.push_back(k.second);
  return out;
}

}  // namespace hysched
