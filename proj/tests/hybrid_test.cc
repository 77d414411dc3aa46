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
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "hysched/metrics.h"
#include "test_util.h"

namespace hysched {
namespace {

using ::hysched::testing::FifoOracle;
using ::hysched::testing::MakeWorkload;
using ::hysched::testing::MigrationInjector;
using ::hysched::testing::OracleTimes;
using ::hysched::testing::RandomSmallWorkload;
using ::hysched::testing::RunOrDie;

PolicyConfig Hybrid(int fifo, int cfs, SimTime limit) {
  PolicyConfig c = PolicyConfig::Defaults(PolicyKind::kHybrid);
  c.ctx_switch_overhead = SimTime::Zero();
  c.fifo_cores = fifo;
  c.cfs_cores = cfs;
  c.preempt_limit = limit;
  return c;
}

// First core each task was seen on, and every core it ran on.
std::vector<std::vector<CoreId>> CoresOf(const SimulationResult& r) {
  std::vector<std::vector<CoreId>> out(r.tasks.size());
  for (const TraceSpan& s : r.trace) {
    out[static_cast<size_t>(s.task)].push_back(s.core);
  }
  return out;
}

TEST(HybridTest, ArrivalsRunOnFifoCores) {
  SimOptions opts;
  opts.record_trace = true;
  SimulationResult r = RunOrDie(MakeWorkload({{Millis(1), Millis(5)}}),
                                Hybrid(2, 2, Millis(100)), 4, opts);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].core, 0);
  EXPECT_EQ(r.tasks[0].group, GroupTag::kFifo);
  EXPECT_EQ(*r.tasks[0].first_run, Millis(1));
}

TEST(HybridTest, TaskUnderLimitIsNeverPreempted) {
  SimulationResult r = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(50)}}),
                                Hybrid(1, 1, Millis(100)), 2);
  EXPECT_EQ(r.tasks[0].preemptions, 0);
  EXPECT_EQ(r.tasks[0].group, GroupTag::kFifo);
  EXPECT_EQ(r.cores[0].limit_expiries, 0);
}

TEST(HybridTest, CompletionAtExactlyTheLimitStaysInFifo) {
  SimulationResult r = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(100)}}),
                                Hybrid(1, 1, Millis(100)), 2);
  EXPECT_EQ(r.tasks[0].preemptions, 0);
  EXPECT_EQ(r.tasks[0].group, GroupTag::kFifo);
  EXPECT_EQ(r.cores[0].limit_expiries, 0);
  EXPECT_EQ(*r.tasks[0].completion, Millis(100));
}

TEST(HybridTest, TaskOverLimitMovesToCfsOnce) {
  SimOptions opts;
  opts.record_trace = true;
  SimulationResult r = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(250)}}),
                                Hybrid(1, 1, Millis(100)), 2, opts);
  EXPECT_EQ(r.tasks[0].preemptions, 1);
  EXPECT_EQ(r.tasks[0].group, GroupTag::kCfs);
  EXPECT_EQ(r.cores[0].limit_expiries, 1);
  EXPECT_EQ(r.cores[0].preemption_count, 0);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].core, 0);
  EXPECT_EQ(r.trace[0].end, Millis(100));
  EXPECT_EQ(r.trace[1].core, 1);
  EXPECT_EQ(*r.tasks[0].completion, Millis(250));
}

TEST(HybridTest, HandoffsCycleOverCfsCores) {
  // One FIFO core, CFS cores 1..3; five long tasks are handed off in turn.
  SimOptions opts;
  opts.record_trace = true;
  std::vector<std::pair<SimTime, SimTime>> tasks(5,
                                                 {SimTime::Zero(), Seconds(1)});
  SimulationResult r =
      RunOrDie(MakeWorkload(tasks), Hybrid(1, 3, Millis(10)), 4, opts);
  std::vector<std::vector<CoreId>> cores = CoresOf(r);
  const std::vector<CoreId> want = {1, 2, 3, 1, 2};
  for (size_t i = 0; i < 5; ++i) {
    ASSERT_GE(cores[i].size(), 2u);
    EXPECT_EQ(cores[i][0], 0);
    EXPECT_EQ(cores[i][1], want[i]) << "task " << i;
  }
}

TEST(HybridTest, FifoCoresNeverSlicePreempt) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    WorkloadSpec w = RandomSmallWorkload(rng, 20);
    SimulationResult r = RunOrDie(w, Hybrid(2, 2, Millis(8)), 4);
    int64_t expiries = 0;
    for (const Core& c : r.cores) {
      if (c.group == GroupTag::kFifo) {
        EXPECT_EQ(c.preemption_count, 0);
        expiries += c.limit_expiries;
      } else {
        EXPECT_EQ(c.limit_expiries, 0);
      }
    }
    int64_t moved = 0;
    for (const Task& t : r.tasks) {
      if (t.group == GroupTag::kCfs) ++moved;
    }
    EXPECT_EQ(expiries, moved);
  }
}

// With an unbounded limit the CFS cores never see work and the FIFO group
// behaves as plain FIFO on its own cores.
TEST(HybridTest, UnboundedLimitDegeneratesToFifo) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    WorkloadSpec w = RandomSmallWorkload(rng, 20);
    const OracleTimes oracle = FifoOracle(w, 2);
    SimulationResult r = RunOrDie(w, Hybrid(2, 2, SimTime::Infinite()), 4);
    for (size_t i = 0; i < r.tasks.size(); ++i) {
      ASSERT_EQ(*r.tasks[i].first_run, oracle.first_run[i]);
      ASSERT_EQ(*r.tasks[i].completion, oracle.completion[i]);
    }
    EXPECT_EQ(r.cores[2].busy, SimTime::Zero());
    EXPECT_EQ(r.cores[3].busy, SimTime::Zero());
  }
}

TEST(HybridTest, MembershipFixedWithoutRightsizing) {
  std::mt19937_64 rng(8);
  SimOptions opts;
  opts.monitor_period = Millis(2);
  for (int trial = 0; trial < 20; ++trial) {
    SimulationResult r = RunOrDie(RandomSmallWorkload(rng, 20),
                                  Hybrid(3, 1, Millis(4)), 4, opts);
    EXPECT_TRUE(r.migrations.empty());
    for (const GroupSample& g : r.groups) {
      EXPECT_EQ(g.fifo_cores, 3);
      EXPECT_EQ(g.cfs_cores, 1);
    }
  }
}

// Drives the scheduler by hand on a machine that is never simulated
// forward, to stage queue contents for the migration examples.
class Staged {
 public:
  Staged(int fifo, int cfs, int tasks)
      : m_(Tasks(tasks), fifo + cfs, SimOptions{}),
        h_(Hybrid(fifo, cfs, Millis(10)), fifo + cfs) {
    EXPECT_TRUE(h_.Init(m_).ok());
    for (TaskId t = 0; t < tasks; ++t) h_.OnArrival(m_, t);
  }

  // Fires the limit timer of FIFO core c, handing its task to the CFS group.
  void Expire(CoreId c) { h_.OnTimer(m_, c, EventKind::kLimitExpiry); }

  Machine& m() { return m_; }
  HybridScheduler& h() { return h_; }

 private:
  static std::vector<Task> Tasks(int n) {
    std::vector<Task> out;
    for (TaskId t = 0; t < n; ++t) {
      out.push_back(MakeTask(t, SimTime::Zero(), Seconds(1)));
    }
    return out;
  }

  Machine m_;
  HybridScheduler h_;
};

TEST(MigrationTest, CfsToFifoStepsInOrderAndBalance) {
  // FIFO core 0, CFS cores 1..3. Eight handoffs leave core 1 running with
  // two queued, core 2 running with two queued, core 3 running with one;
  // one task still waits in the FIFO queue.
  Staged s(1, 3, 10);
  for (int i = 0; i < 8; ++i) s.Expire(0);
  const CfsGroup& g = s.h().cfs_group();
  ASSERT_EQ(g.Load(s.m(), 1), 3);
  ASSERT_EQ(g.Load(s.m(), 2), 3);
  ASSERT_EQ(g.Load(s.m(), 3), 2);

  const std::vector<TaskId> before = s.h().InFlight(s.m());
  std::vector<std::string> steps;
  absl::Status st = s.h().MigrateCfsToFifo(
      s.m(), 1,
      [&](MigrationStep step, const HybridScheduler& h, const Machine& m) {
        steps.push_back(MigrationStepName(step));
        EXPECT_EQ(h.InFlight(m), before) << MigrationStepName(step);
        if (step != MigrationStep::kUnlock) {
          EXPECT_TRUE(m.core(1).locked);
        }
        if (step == MigrationStep::kPreempt ||
            step == MigrationStep::kMigrate) {
          EXPECT_TRUE(m.idle(1));
        }
        if (step == MigrationStep::kMigrate) {
          EXPECT_EQ(h.cfs_group().queued(1), 0u);
          const int a = h.cfs_group().Load(m, 2);
          const int b = h.cfs_group().Load(m, 3);
          EXPECT_LE(std::abs(a - b), 1);
          EXPECT_EQ(a + b, 8);
        }
      });
  ASSERT_TRUE(st.ok()) << st;
  EXPECT_EQ(steps, (std::vector<std::string>{"lock", "preempt", "migrate",
                                             "transition", "unlock"}));
  EXPECT_EQ(s.m().core(1).group, GroupTag::kFifo);
  EXPECT_FALSE(s.m().core(1).locked);
  EXPECT_EQ(s.h().fifo_members(), (std::vector<CoreId>{0, 1}));
  // The new FIFO core pulls from the global queue at once.
  EXPECT_FALSE(s.m().idle(1));
  EXPECT_EQ(s.m().core(1).group, GroupTag::kFifo);
}

TEST(MigrationTest, IdleCoreJustFlipsMembership) {
  Staged s(2, 2, 1);
  std::vector<std::string> steps;
  const absl::Status st = s.h().MigrateCfsToFifo(
      s.m(), 3,
      [&](MigrationStep step, const HybridScheduler&, const Machine&) {
        steps.push_back(MigrationStepName(step));
      });
  ASSERT_TRUE(st.ok()) << st;
  EXPECT_EQ(steps.size(), 5u);
  EXPECT_EQ(s.h().fifo_members(), (std::vector<CoreId>{0, 1, 3}));
  EXPECT_EQ(s.h().cfs_group().members(), (std::vector<CoreId>{2}));
  EXPECT_TRUE(s.m().idle(3));
}

TEST(MigrationTest, FifoToCfsRequeuesRunningTaskAndRebalances) {
  // FIFO cores 0, 1 run tasks 0, 1. Six handoffs from core 0 leave CFS
  // cores 2 and 3 each running one task with two queued.
  Staged s(2, 2, 10);
  for (int i = 0; i < 6; ++i) s.Expire(0);
  ASSERT_EQ(s.h().cfs_group().Load(s.m(), 2), 3);
  ASSERT_EQ(s.h().cfs_group().Load(s.m(), 3), 3);
  const TaskId on_core_1 = *s.m().core(1).running;

  const std::vector<TaskId> before = s.h().InFlight(s.m());
  std::vector<std::string> steps;
  const absl::Status st = s.h().MigrateFifoToCfs(
      s.m(), 1,
      [&](MigrationStep step, const HybridScheduler& h, const Machine& m) {
        steps.push_back(MigrationStepName(step));
        EXPECT_EQ(h.InFlight(m), before) << MigrationStepName(step);
        if (step == MigrationStep::kPreempt) {
          EXPECT_EQ(h.fifo_queue().front(), on_core_1);
          EXPECT_TRUE(m.idle(1));
        }
        if (step == MigrationStep::kMigrate) {
          // The staged core only queues until it is unlocked.
          EXPECT_TRUE(m.core(1).locked);
          EXPECT_TRUE(m.idle(1));
          for (CoreId c : {1, 2, 3}) EXPECT_EQ(h.cfs_group().Load(m, c), 2);
        }
      });
  ASSERT_TRUE(st.ok()) << st;
  EXPECT_EQ(steps, (std::vector<std::string>{"lock", "preempt", "migrate",
                                             "transition", "unlock"}));
  EXPECT_EQ(s.h().fifo_members(), (std::vector<CoreId>{0}));
  EXPECT_EQ(s.h().cfs_group().members(), (std::vector<CoreId>{1, 2, 3}));
  EXPECT_EQ(s.m().core(1).group, GroupTag::kCfs);
  EXPECT_FALSE(s.m().idle(1));
  EXPECT_EQ(s.h().fifo_queue().front(), on_core_1);
  EXPECT_EQ(s.m().task(on_core_1).preemptions, 1);
}

TEST(MigrationTest, RefusesWrongGroupAndMinimumSize) {
  Staged s(1, 1, 0);
  absl::Status st = s.h().MigrateCfsToFifo(s.m(), 0);
  EXPECT_EQ(st.code(), absl::StatusCode::kInvalidArgument);
  st = s.h().MigrateFifoToCfs(s.m(), 1);
  EXPECT_EQ(st.code(), absl::StatusCode::kInvalidArgument);
  st = s.h().MigrateCfsToFifo(s.m(), 1);
  EXPECT_EQ(st.code(), absl::StatusCode::kFailedPrecondition);
  st = s.h().MigrateFifoToCfs(s.m(), 0);
  EXPECT_EQ(st.code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(s.m().core(0).locked);
  EXPECT_FALSE(s.m().core(1).locked);
}

TEST(CfsRebalanceTest, NewQueueTakesAnEvenShare) {
  // Core 0 runs one task and queues 4, core 1 runs one and queues 2; core 2
  // joins locked and empty. Runnable counts 5, 3, 0 settle at 3, 3, 2,
  // which is queue lengths 2, 2, 2.
  std::vector<Task> tasks;
  for (TaskId t = 0; t < 8; ++t) {
    tasks.push_back(MakeTask(t, SimTime::Zero(), Seconds(1)));
  }
  Machine m(tasks, 3, SimOptions{});
  PolicyConfig c = Hybrid(1, 2, Millis(10));
  CfsGroup g(c, 3);
  g.AddCore(0);
  g.AddCore(1);
  for (TaskId t = 0; t < 5; ++t) g.Place(m, 0, t);
  for (TaskId t = 5; t < 8; ++t) g.Place(m, 1, t);
  ASSERT_EQ(g.queued(0), 4u);
  ASSERT_EQ(g.queued(1), 2u);

  m.core(2).locked = true;
  g.AddCore(2);
  g.Rebalance(m, /*staged=*/2);
  EXPECT_EQ(g.queued(0), 2u);
  EXPECT_EQ(g.queued(1), 2u);
  EXPECT_EQ(g.queued(2), 2u);
  EXPECT_TRUE(m.idle(2));
}

TEST(CfsRebalanceTest, NoQueuedTasksLeavesNewQueueEmpty) {
  std::vector<Task> tasks = {MakeTask(0, SimTime::Zero(), Seconds(1))};
  Machine m(tasks, 2, SimOptions{});
  CfsGroup g(Hybrid(1, 1, Millis(10)), 2);
  g.AddCore(0);
  g.Place(m, 0, 0);
  g.AddCore(1);
  g.Rebalance(m);
  EXPECT_EQ(g.queued(1), 0u);
  EXPECT_TRUE(m.idle(1));
  EXPECT_EQ(*m.core(0).running, 0);
}

TEST(MigrationTest, RandomInjectionConservesTasks) {
  std::mt19937_64 rng(77);
  SimOptions opts;
  opts.check_invariants = true;
  opts.monitor_period = Millis(1);
  int migrations = 0;
  for (int trial = 0; trial < 60; ++trial) {
    WorkloadSpec w = RandomSmallWorkload(rng, 20);
    const int cores = 3 + trial % 4;
    PolicyConfig c = Hybrid(cores / 2, cores - cores / 2, Millis(4));
    c.slice = Millis(3);
    c.ctx_switch_overhead = Micros(trial % 2 ? 5 : 0);
    MigrationInjector s(c, cores, rng());
    absl::StatusOr<SimulationResult> r = Simulate(w, s, cores, opts);
    ASSERT_TRUE(r.ok()) << r.status();
    ASSERT_TRUE(r->drained());
    SimTime busy, demand;
    for (const Core& core : r->cores) busy += core.busy;
    for (const Task& t : r->tasks) {
      ASSERT_TRUE(t.done());
      demand += t.demand;
      EXPECT_TRUE(TaskMetrics(t).ok());
    }
    EXPECT_EQ(busy, demand);
    EXPECT_TRUE(s.problems.empty()) << s.problems.front();
    EXPECT_EQ(s.steps, 5 * s.migrations);
    EXPECT_EQ(static_cast<int>(r->migrations.size()), s.migrations);
    migrations += s.migrations;
  }
  EXPECT_GT(migrations, 100);
}

}  // namespace
}  // namespace hysched
