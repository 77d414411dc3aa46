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

// Baseline policies: FIFO, FIFO with a preemption limit, round robin, EDF
// and the CFS approximation.

#include <deque>
#include <set>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "hysched/cfs_group.h"
#include "hysched/engine.h"
#include "hysched/hybrid.h"
#include "hysched/policy.h"

namespace hysched {

const char* PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kFifo:
      return "fifo";
    case PolicyKind::kFifoPreempt:
      return "fifo_preempt";
    case PolicyKind::kCfs:
      return "cfs";
    case PolicyKind::kRr:
      return "rr";
    case PolicyKind::kEdf:
      return "edf";
    case PolicyKind::kHybrid:
      return "hybrid";
  }
  return "unknown";
}

absl::StatusOr<PolicyKind> ParsePolicyKind(absl::string_view name) {
  std::string lower = absl::AsciiStrToLower(name);
  for (PolicyKind k :
       {PolicyKind::kFifo, PolicyKind::kFifoPreempt, PolicyKind::kCfs,
        PolicyKind::kRr, PolicyKind::kEdf, PolicyKind::kHybrid}) {
    if (lower == PolicyKindName(k)) return k;
  }
  if (lower == "fifo-preempt") return PolicyKind::kFifoPreempt;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown policy '", name, "'"));
}

PolicyConfig PolicyConfig::Defaults(PolicyKind kind) {
  PolicyConfig c;
  c.kind = kind;
  if (kind == PolicyKind::kHybrid) c.preempt_limit = Millis(1633);
  return c;
}

absl::Status PolicyConfig::Validate(int enclave_cores) const {
  auto positive = [](SimTime t, const char* field) -> absl::Status {
    if (t.micros() <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("policy.", field, " must be > 0"));
    }
    return absl::OkStatus();
  };
  if (enclave_cores < 1) {
    return absl::InvalidArgumentError("engine.enclave_cores must be >= 1");
  }
  for (auto [t, f] : {std::pair{slice, "slice"},
                      std::pair{min_granularity, "min_granularity"},
                      std::pair{preempt_limit, "preempt_limit"},
                      std::pair{deadline_offset, "deadline_offset"}}) {
    if (absl::Status s = positive(t, f); !s.ok()) return s;
  }
  if (ctx_switch_overhead.micros() < 0) {
    return absl::InvalidArgumentError(
        "policy.ctx_switch_overhead must be >= 0");
  }
  if (kind != PolicyKind::kHybrid) return absl::OkStatus();
  if (fifo_cores < 1 || cfs_cores < 1) {
    return absl::InvalidArgumentError(
        "hybrid.fifo_cores and hybrid.cfs_cores must be >= 1");
  }
  if (fifo_cores + cfs_cores != enclave_cores) {
    return absl::InvalidArgumentError(absl::StrCat(
        "hybrid.fifo_cores + hybrid.cfs_cores = ", fifo_cores + cfs_cores,
        " but engine.enclave_cores = ", enclave_cores));
  }
  if (adapt.enabled) {
    if (!(adapt.percentile > 0.0 && adapt.percentile <= 100.0)) {
      return absl::InvalidArgumentError("adapt.percentile must be in (0, 100]");
    }
    if (adapt.window < 1) {
      return absl::InvalidArgumentError("adapt.window must be >= 1");
    }
  }
  if (rightsize.enabled) {
    if (!(rightsize.util_threshold > 0.0 && rightsize.util_threshold < 1.0)) {
      return absl::InvalidArgumentError(
          "rightsize.util_threshold must be in (0, 1)");
    }
    if (rightsize.min_group_size < 1) {
      return absl::InvalidArgumentError(
          "rightsize.min_group_size must be >= 1");
    }
    if (rightsize.check_period.micros() <= 0) {
      return absl::InvalidArgumentError("rightsize.check_period must be > 0");
    }
    if (rightsize.cooldown.micros() < 0) {
      return absl::InvalidArgumentError("rightsize.cooldown must be >= 0");
    }
  }
  return absl::OkStatus();
}

namespace {

// FIFO, FIFO_PREEMPT and RR share one global arrival-ordered queue and
// differ only in the per-dispatch budget and what happens when it runs out.
class GlobalQueueScheduler : public Scheduler {
 public:
  explicit GlobalQueueScheduler(const PolicyConfig& config) : config_(config) {}

  absl::string_view name() const override {
    return PolicyKindName(config_.kind);
  }

  absl::Status Init(Machine& m) override {
    m.set_switch_overhead(config_.ctx_switch_overhead);
    return absl::OkStatus();
  }

  void OnArrival(Machine& m, TaskId task) override {
    queue_.push_back(task);
    for (CoreId c = 0; c < m.num_cores() && !queue_.empty(); ++c) {
      if (m.idle(c) && !m.core(c).locked) RunHead(m, c, false);
    }
  }

  void OnTimer(Machine& m, CoreId core, EventKind) override {
    if (config_.kind == PolicyKind::kRr && queue_.empty()) {
      m.Continue(core, Budget(), EventKind::kSliceExpiry);
      return;
    }
    // FIFO_PREEMPT always sends the task to the tail, even when it is the
    // only one and comes straight back.
    TaskId t = m.Preempt(core, PreemptReason::kSlice);
    queue_.push_back(t);
    const bool switched = queue_.front() != t;
    RunHead(m, core, switched);
  }

  void OnCompletion(Machine& m, CoreId core, TaskId) override {
    if (!queue_.empty()) RunHead(m, core, false);
  }

 private:
  SimTime Budget() const {
    switch (config_.kind) {
      case PolicyKind::kFifoPreempt:
        return config_.preempt_limit;
      case PolicyKind::kRr:
        return config_.slice;
      default:
        return SimTime::Infinite();
    }
  }

  void RunHead(Machine& m, CoreId c, bool after_switch) {
    TaskId t = queue_.front();
    queue_.pop_front();
    m.Dispatch(c, t, Budget(), EventKind::kSliceExpiry, after_switch);
  }

  PolicyConfig config_;
  std::deque<TaskId> queue_;
};

// Preemptive earliest-deadline-first with deadline = arrival + offset.
class EdfScheduler : public Scheduler {
 public:
  EdfScheduler(const PolicyConfig& config, DeadlineFn deadline)
      : config_(config), deadline_(std::move(deadline)) {}

  absl::string_view name() const override { return "edf"; }

  absl::Status Init(Machine& m) override {
    m.set_switch_overhead(config_.ctx_switch_overhead);
    return absl::OkStatus();
  }

  void OnArrival(Machine& m, TaskId task) override {
    const Key key = KeyOf(m, task);
    CoreId victim = kNoCore;
    Key victim_key{};
    for (CoreId c = 0; c < m.num_cores(); ++c) {
      if (m.core(c).locked) continue;
      if (m.idle(c)) {
        m.Dispatch(c, task, SimTime::Infinite(), EventKind::kSliceExpiry,
                   false);
        return;
      }
      Key k = KeyOf(m, *m.core(c).running);
      if (victim == kNoCore || victim_key < k) {
        victim = c;
        victim_key = k;
      }
    }
    if (victim != kNoCore && key < victim_key) {
      TaskId old = m.Preempt(victim, PreemptReason::kDeadline);
      queue_.insert(KeyOf(m, old));
      m.Dispatch(victim, task, SimTime::Infinite(), EventKind::kSliceExpiry,
                 true);
      return;
    }
    queue_.insert(key);
  }

  void OnTimer(Machine& m, CoreId core, EventKind kind) override {
    m.Continue(core, SimTime::Infinite(), kind);
  }

  void OnCompletion(Machine& m, CoreId core, TaskId) override {
    if (queue_.empty()) return;
    TaskId next = queue_.begin()->second;
    queue_.erase(queue_.begin());
    m.Dispatch(core, next, SimTime::Infinite(), EventKind::kSliceExpiry, false);
  }

 private:
  using Key = std::pair<int64_t, TaskId>;  // (deadline, id)

  Key KeyOf(const Machine& m, TaskId t) const {
    return {deadline_(m.task(t)).micros(), t};
  }

  PolicyConfig config_;
  DeadlineFn deadline_;
  std::set<Key> queue_;
};

// CFS approximation over every core of the enclave.
class CfsScheduler : public Scheduler {
 public:
  CfsScheduler(const PolicyConfig& config, int num_cores)
      : config_(config), group_(config, num_cores) {}

  absl::string_view name() const override { return "cfs"; }

  absl::Status Init(Machine& m) override {
    m.set_switch_overhead(config_.ctx_switch_overhead);
    for (CoreId c = 0; c < m.num_cores(); ++c) group_.AddCore(c);
    return absl::OkStatus();
  }

  void OnArrival(Machine& m, TaskId task) override {
    group_.Place(m, group_.LeastLoaded(m), task);
  }

  void OnTimer(Machine& m, CoreId core, EventKind) override {
    group_.OnSliceExpiry(m, core);
  }

  void OnCompletion(Machine& m, CoreId core, TaskId) override {
    group_.DispatchNext(m, core, false);
  }

 private:
  PolicyConfig config_;
  CfsGroup group_;
};

}  // namespace

std::unique_ptr<Scheduler> MakeEdfScheduler(const PolicyConfig& config,
                                            DeadlineFn deadline) {
  return std::make_unique<EdfScheduler>(config, std::move(deadline));
}

absl::StatusOr<std::unique_ptr<Scheduler>> MakeScheduler(
    const PolicyConfig& config, int num_cores) {
  if (absl::Status s = config.Validate(num_cores); !s.ok()) return s;
  switch (config.kind) {
    case PolicyKind::kFifo:
    case PolicyKind::kFifoPreempt:
    case PolicyKind::kRr:
      return std::make_unique<GlobalQueueScheduler>(config);
    case PolicyKind::kEdf:
      return MakeEdfScheduler(config,
                              [offset = config.deadline_offset](const Task& t) {
                                return t.arrival + offset;
                              });
    case PolicyKind::kCfs:
      return std::make_unique<CfsScheduler>(config, num_cores);
    case PolicyKind::kHybrid:
      return std::make_unique<HybridScheduler>(config, num_cores);
  }
  return absl::InvalidArgumentError("unknown policy kind");
}

}  // namespace hysched
