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

#include <algorithm>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "hysched/cfs_group.h"
#include "hysched/engine.h"
#include "hysched/metrics.h"
#include "test_util.h"

namespace hysched {
namespace {

using ::hysched::testing::FifoOracle;
using ::hysched::testing::MakeWorkload;
using ::hysched::testing::NoOverhead;
using ::hysched::testing::OracleTimes;
using ::hysched::testing::RandomSmallWorkload;
using ::hysched::testing::RunOrDie;

TEST(PolicyConfigTest, ParsesKindNames) {
  EXPECT_EQ(*ParsePolicyKind("fifo"), PolicyKind::kFifo);
  EXPECT_EQ(*ParsePolicyKind("fifo_preempt"), PolicyKind::kFifoPreempt);
  EXPECT_EQ(*ParsePolicyKind("fifo-preempt"), PolicyKind::kFifoPreempt);
  EXPECT_EQ(*ParsePolicyKind("CFS"), PolicyKind::kCfs);
  EXPECT_EQ(*ParsePolicyKind("hybrid"), PolicyKind::kHybrid);
  EXPECT_FALSE(ParsePolicyKind("lottery").ok());
  for (PolicyKind k :
       {PolicyKind::kFifo, PolicyKind::kFifoPreempt, PolicyKind::kCfs,
        PolicyKind::kRr, PolicyKind::kEdf, PolicyKind::kHybrid}) {
    EXPECT_EQ(*ParsePolicyKind(PolicyKindName(k)), k);
  }
}

TEST(PolicyConfigTest, Defaults) {
  PolicyConfig cfs = PolicyConfig::Defaults(PolicyKind::kCfs);
  EXPECT_EQ(cfs.slice, Millis(6));
  EXPECT_EQ(cfs.min_granularity, Micros(750));
  EXPECT_EQ(cfs.ctx_switch_overhead, Micros(5));
  EXPECT_EQ(PolicyConfig::Defaults(PolicyKind::kFifoPreempt).preempt_limit,
            Millis(100));
  EXPECT_EQ(PolicyConfig::Defaults(PolicyKind::kHybrid).preempt_limit,
            Millis(1633));
}

TEST(PolicyConfigTest, ValidationNamesTheField) {
  PolicyConfig c = PolicyConfig::Defaults(PolicyKind::kCfs);
  c.slice = SimTime::Zero();
  absl::Status s = c.Validate(4);
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.message().find("policy.slice"), absl::string_view::npos);

  c = PolicyConfig::Defaults(PolicyKind::kRr);
  c.ctx_switch_overhead = Micros(-1);
  EXPECT_FALSE(c.Validate(4).ok());
  c.ctx_switch_overhead = SimTime::Zero();
  EXPECT_TRUE(c.Validate(4).ok());

  c = PolicyConfig::Defaults(PolicyKind::kHybrid);
  s = c.Validate(40);
  ASSERT_FALSE(s.ok());
  EXPECT_NE(s.message().find("hybrid.fifo_cores"), absl::string_view::npos);
  EXPECT_TRUE(c.Validate(50).ok());
  c.rightsize.enabled = true;
  c.rightsize.util_threshold = 1.5;
  EXPECT_FALSE(c.Validate(50).ok());
  EXPECT_FALSE(MakeScheduler(c, 50).ok());
}

TEST(FifoTest, IdleCoreRunsArrivalImmediately) {
  SimulationResult r = RunOrDie(MakeWorkload({{Millis(3), Millis(2)}}),
                                PolicyConfig::Defaults(PolicyKind::kFifo), 4);
  EXPECT_EQ(*r.tasks[0].first_run, Millis(3));
}

TEST(FifoTest, QueueKeepsArrivalOrder) {
  // One core busy until 10 ms; a arrives at 1 ms, b at 2 ms.
  SimulationResult r = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(10)},
                                              {Millis(1), Millis(5)},
                                              {Millis(2), Millis(1)}}),
                                PolicyConfig::Defaults(PolicyKind::kFifo), 1);
  EXPECT_EQ(*r.tasks[1].first_run, Millis(10));
  EXPECT_EQ(*r.tasks[2].first_run, Millis(15));
}

TEST(FifoTest, ExecutionEqualsDemandAndOrderIsStable) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    WorkloadSpec w = RandomSmallWorkload(rng, 20);
    SimOptions opts;
    opts.record_trace = true;
    SimulationResult r =
        RunOrDie(w, PolicyConfig::Defaults(PolicyKind::kFifo), 3, opts);
    for (const Task& t : r.tasks) {
      EXPECT_EQ(TaskMetrics(t)->execution, t.demand);
      EXPECT_EQ(t.preemptions, 0);
    }
    // One span per task, started in id (= arrival) order.
    ASSERT_EQ(r.trace.size(), r.tasks.size());
    for (size_t i = 0; i < r.trace.size(); ++i) {
      EXPECT_EQ(r.trace[i].task, static_cast<TaskId>(i));
    }
  }
}

TEST(FifoPreemptTest, ShortTaskIsNeverPreempted) {
  SimulationResult r =
      RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(50)}}),
               PolicyConfig::Defaults(PolicyKind::kFifoPreempt), 1);
  EXPECT_EQ(r.tasks[0].preemptions, 0);
  EXPECT_EQ(*r.tasks[0].completion, Millis(50));
}

TEST(FifoPreemptTest, PreemptedOncePerElapsedLimit) {
  // ceil(250 / 100) - 1 preemptions, at 100 ms and 200 ms of runtime.
  SimOptions opts;
  opts.record_trace = true;
  SimulationResult r =
      RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(250)}}),
               PolicyConfig::Defaults(PolicyKind::kFifoPreempt), 1, opts);
  EXPECT_EQ(r.tasks[0].preemptions, 2);
  ASSERT_EQ(r.trace.size(), 3u);
  EXPECT_EQ(r.trace[0].end, Millis(100));
  EXPECT_EQ(r.trace[1].end, Millis(200));
  // Alone, it resumes without a switch.
  EXPECT_EQ(*r.tasks[0].completion, Millis(250));
}

TEST(FifoPreemptTest, PreemptedTaskGoesToTheTail) {
  PolicyConfig c = NoOverhead(PolicyKind::kFifoPreempt);
  SimulationResult r = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(150)},
                                              {Millis(1), Millis(30)},
                                              {Millis(2), Millis(30)}}),
                                c, 1);
  EXPECT_EQ(*r.tasks[1].completion, Millis(130));
  EXPECT_EQ(*r.tasks[2].completion, Millis(160));
  EXPECT_EQ(*r.tasks[0].completion, Millis(210));
}

TEST(RoundRobinTest, RotatesOnSliceExpiry) {
  PolicyConfig c = NoOverhead(PolicyKind::kRr);
  c.slice = Millis(2);
  SimulationResult r = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(3)},
                                              {SimTime::Zero(), Millis(3)}}),
                                c, 1);
  // A 0-2, B 2-4, A 4-5, B 5-6.
  EXPECT_EQ(*r.tasks[0].completion, Millis(5));
  EXPECT_EQ(*r.tasks[1].completion, Millis(6));
  EXPECT_EQ(*r.tasks[1].first_run, Millis(2));
}

TEST(CfsTest, PlacesArrivalOnShortestQueue) {
  // Core 0 ends up with two runnable tasks, core 1 with one; the fourth
  // arrival must join core 1.
  PolicyConfig c = NoOverhead(PolicyKind::kCfs);
  SimOptions opts;
  opts.record_trace = true;
  SimulationResult r = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(100)},
                                              {SimTime::Zero(), Millis(100)},
                                              {SimTime::Zero(), Millis(100)},
                                              {Millis(1), Millis(1)}}),
                                c, 2, opts);
  std::vector<CoreId> core_of(4, kNoCore);
  for (const TraceSpan& s : r.trace) {
    if (core_of[static_cast<size_t>(s.task)] == kNoCore) {
      core_of[static_cast<size_t>(s.task)] = s.core;
    }
    EXPECT_EQ(core_of[static_cast<size_t>(s.task)], s.core)
        << "no work stealing: tasks stay on their core";
  }
  EXPECT_EQ(core_of[0], 0);
  EXPECT_EQ(core_of[1], 1);
  EXPECT_EQ(core_of[2], 0);
  EXPECT_EQ(core_of[3], 1);
}

TEST(CfsTest, EqualTasksSplitTargetLatency) {
  PolicyConfig c = NoOverhead(PolicyKind::kCfs);
  SimOptions opts;
  opts.record_trace = true;
  SimulationResult r = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(30)},
                                              {SimTime::Zero(), Millis(30)}}),
                                c, 1, opts);
  // A runs a solo 6 ms quantum; B then takes two 3 ms quanta back to back
  // to catch up (one span); from there on the tasks alternate every
  // slice / 2 = 3 ms until the remainders.
  ASSERT_GT(r.trace.size(), 4u);
  EXPECT_EQ(r.trace[0].end - r.trace[0].start, Millis(6));
  EXPECT_EQ(r.trace[1].end - r.trace[1].start, Millis(6));
  for (size_t i = 2; i + 2 < r.trace.size(); ++i) {
    EXPECT_EQ(r.trace[i].end - r.trace[i].start, Millis(3)) << i;
  }
}

TEST(CfsTest, QuantumFloorsAtMinGranularity) {
  PolicyConfig c = NoOverhead(PolicyKind::kCfs);
  std::vector<std::pair<SimTime, SimTime>> tasks(20,
                                                 {SimTime::Zero(), Millis(5)});
  SimOptions opts;
  opts.record_trace = true;
  SimulationResult r = RunOrDie(MakeWorkload(tasks), c, 1, opts);
  SimTime shortest = SimTime::Infinite();
  for (const TraceSpan& s : r.trace) {
    if (!r.tasks[static_cast<size_t>(s.task)].completion ||
        *r.tasks[static_cast<size_t>(s.task)].completion != s.end) {
      shortest = std::min(shortest, s.end - s.start);
    }
  }
  EXPECT_EQ(shortest, Micros(750));
}

// Picks from a CFS queue and checks the min-vruntime rule directly.
TEST(CfsTest, PicksMinimumVruntime) {
  std::vector<Task> tasks;
  for (TaskId id = 0; id < 4; ++id) {
    tasks.push_back(MakeTask(id, SimTime::Zero(), Seconds(1)));
  }
  tasks[1].vruntime = Micros(5);
  tasks[2].vruntime = Micros(3);
  tasks[3].vruntime = Micros(7);
  Machine m(tasks, 1, SimOptions{});
  PolicyConfig c = NoOverhead(PolicyKind::kCfs);
  CfsGroup g(c, 1);
  g.AddCore(0);
  g.Place(m, 0, 0);  // runs
  for (TaskId id = 1; id < 4; ++id) g.Place(m, 0, id);
  EXPECT_EQ(g.queued(0), 3u);
  g.PreemptRunning(m, 0, PreemptReason::kSlice);
  g.DispatchNext(m, 0, false);
  EXPECT_EQ(*m.core(0).running, 2);
}

TEST(CfsTest, JoinsAtQueueMinimumVruntime) {
  std::vector<Task> tasks;
  for (TaskId id = 0; id < 3; ++id) {
    tasks.push_back(MakeTask(id, SimTime::Zero(), Seconds(1)));
  }
  tasks[0].vruntime = Millis(40);
  tasks[1].vruntime = Millis(50);
  Machine m(tasks, 1, SimOptions{});
  CfsGroup g(NoOverhead(PolicyKind::kCfs), 1);
  g.AddCore(0);
  g.Place(m, 0, 0);
  g.Place(m, 0, 1);
  g.Place(m, 0, 2);  // vruntime 0 lifts to 40
  EXPECT_EQ(m.task(2).vruntime, Millis(40));
  EXPECT_EQ(m.task(1).vruntime, Millis(50));
}

// A CFS policy that audits its queues after every callback.
class AuditedCfs : public Scheduler {
 public:
  AuditedCfs(const PolicyConfig& c, int cores) : config_(c), g_(c, cores) {}
  absl::string_view name() const override { return "audited-cfs"; }
  absl::Status Init(Machine& m) override {
    for (CoreId c = 0; c < m.num_cores(); ++c) g_.AddCore(c);
    return absl::OkStatus();
  }
  void OnArrival(Machine& m, TaskId t) override {
    g_.Place(m, g_.LeastLoaded(m), t);
    Audit(m);
  }
  void OnTimer(Machine& m, CoreId c, EventKind) override {
    g_.OnSliceExpiry(m, c);
    Audit(m);
  }
  void OnCompletion(Machine& m, CoreId c, TaskId) override {
    g_.DispatchNext(m, c, false);
    Audit(m);
  }

  SimTime max_spread;
  bool picked_non_minimum = false;

 private:
  void Audit(const Machine& m) {
    for (CoreId c : g_.members()) {
      std::vector<TaskId> q = g_.Queued(c);
      if (m.core(c).running) q.push_back(*m.core(c).running);
      if (q.empty()) continue;
      SimTime lo = SimTime::Infinite(), hi;
      for (TaskId t : q) {
        lo = std::min(lo, m.task(t).vruntime);
        hi = std::max(hi, m.task(t).vruntime);
      }
      max_spread = std::max(max_spread, hi - lo);
      // The running task may trail the queue only by its own unaccounted
      // slice, never lead the queue minimum at dispatch.
      if (m.core(c).running && m.core(c).armed_service == SimTime::Zero()) {
        for (TaskId t : g_.Queued(c)) {
          if (m.task(t).vruntime < m.task(*m.core(c).running).vruntime) {
            picked_non_minimum = true;
          }
        }
      }
    }
  }

  PolicyConfig config_;
  CfsGroup g_;
};

TEST(CfsTest, DispatchesMinimumAndBoundsSpread) {
  PolicyConfig c = NoOverhead(PolicyKind::kCfs);
  std::vector<std::pair<SimTime, SimTime>> tasks(8,
                                                 {SimTime::Zero(), Millis(40)});
  AuditedCfs s(c, 2);
  absl::StatusOr<SimulationResult> r =
      Simulate(MakeWorkload(tasks), s, 2, SimOptions{});
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_FALSE(s.picked_non_minimum);
  EXPECT_LE(s.max_spread, c.slice);
}

TEST(EdfTest, CloserDeadlinePreemptsRunningTask) {
  // Task 0 (deadline 100 ms) runs; task 1 arrives at 10 ms with deadline
  // 40 ms and takes the core.
  std::vector<SimTime> deadline = {Millis(100), Millis(40)};
  std::unique_ptr<Scheduler> s = MakeEdfScheduler(
      NoOverhead(PolicyKind::kEdf),
      [&](const Task& t) { return deadline[static_cast<size_t>(t.id)]; });
  absl::StatusOr<SimulationResult> r = Simulate(
      MakeWorkload({{SimTime::Zero(), Millis(50)}, {Millis(10), Millis(5)}}),
      *s, 1);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r->tasks[1].first_run, Millis(10));
  EXPECT_EQ(*r->tasks[1].completion, Millis(15));
  EXPECT_EQ(r->tasks[0].preemptions, 1);
  EXPECT_EQ(*r->tasks[0].completion, Millis(55));
  EXPECT_EQ(r->cores[0].preemption_count, 1);
}

TEST(EdfTest, LaterDeadlineWaits) {
  std::vector<SimTime> deadline = {Millis(40), Millis(100), Millis(60)};
  std::unique_ptr<Scheduler> s = MakeEdfScheduler(
      NoOverhead(PolicyKind::kEdf),
      [&](const Task& t) { return deadline[static_cast<size_t>(t.id)]; });
  absl::StatusOr<SimulationResult> r =
      Simulate(MakeWorkload({{SimTime::Zero(), Millis(20)},
                             {Millis(1), Millis(5)},
                             {Millis(2), Millis(5)}}),
               *s, 1);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->tasks[0].preemptions, 0);
  // Queue served by deadline: task 2 (60 ms) before task 1 (100 ms).
  EXPECT_EQ(*r->tasks[2].first_run, Millis(20));
  EXPECT_EQ(*r->tasks[1].first_run, Millis(25));
}

TEST(EdfTest, ConstantOffsetNeverPreempts) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    SimulationResult r = RunOrDie(RandomSmallWorkload(rng, 20),
                                  PolicyConfig::Defaults(PolicyKind::kEdf), 2);
    for (const Task& t : r.tasks) EXPECT_EQ(t.preemptions, 0);
  }
}

// RR with an unbounded slice and FIFO_PREEMPT with an unbounded limit must
// reproduce FIFO exactly. The reference is an independent list-scheduling
// oracle, not the engine's FIFO.
TEST(EquivalenceTest, UnboundedSliceAndLimitMatchFifoOracle) {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> cores_dist(1, 4);
  for (int trial = 0; trial < 100; ++trial) {
    WorkloadSpec w = RandomSmallWorkload(rng, 20);
    const int cores = cores_dist(rng);
    const OracleTimes oracle = FifoOracle(w, cores);

    PolicyConfig rr = PolicyConfig::Defaults(PolicyKind::kRr);
    rr.slice = SimTime::Infinite();
    PolicyConfig fp = PolicyConfig::Defaults(PolicyKind::kFifoPreempt);
    fp.preempt_limit = SimTime::Infinite();
    for (const PolicyConfig& c :
         {PolicyConfig::Defaults(PolicyKind::kFifo), rr, fp}) {
      SimulationResult r = RunOrDie(w, c, cores);
      for (size_t i = 0; i < r.tasks.size(); ++i) {
        ASSERT_EQ(*r.tasks[i].first_run, oracle.first_run[i])
            << PolicyKindName(c.kind) << " trial " << trial << " task " << i;
        ASSERT_EQ(*r.tasks[i].completion, oracle.completion[i])
            << PolicyKindName(c.kind) << " trial " << trial << " task " << i;
        ASSERT_EQ(r.tasks[i].preemptions, 0);
      }
    }
  }
}

TEST(EquivalenceTest, SliceCoveringEveryDemandMatchesFifo) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    WorkloadSpec w = RandomSmallWorkload(rng, 20);
    PolicyConfig rr = PolicyConfig::Defaults(PolicyKind::kRr);
    rr.slice = Millis(30);  // max demand of RandomSmallWorkload
    SimulationResult a = RunOrDie(w, rr, 2);
    SimulationResult b =
        RunOrDie(w, PolicyConfig::Defaults(PolicyKind::kFifo), 2);
    for (size_t i = 0; i < a.tasks.size(); ++i) {
      ASSERT_EQ(a.tasks[i].completion, b.tasks[i].completion);
    }
  }
}

TEST(PreemptionTest, InterruptedTasksStretchExecution) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    WorkloadSpec w = RandomSmallWorkload(rng, 20);
    for (PolicyKind kind : {PolicyKind::kCfs, PolicyKind::kRr}) {
      PolicyConfig c = PolicyConfig::Defaults(kind);
      c.slice = Millis(2);
      SimulationResult r = RunOrDie(w, c, 2);
      SimTime exec, demand;
      bool interrupted = false;
      for (const Task& t : r.tasks) {
        exec += TaskMetrics(t)->execution;
        demand += t.demand;
        if (TaskMetrics(t)->execution != t.demand) interrupted = true;
      }
      EXPECT_GE(exec, demand);
      EXPECT_EQ(exec == demand, !interrupted);
    }
  }
}

}  // namespace
}  // namespace hysched
