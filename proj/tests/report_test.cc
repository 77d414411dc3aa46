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

#include "hysched/report.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace hysched {
namespace {

using ::hysched::testing::MakeWorkload;
using ::hysched::testing::RandomSmallWorkload;
using ::hysched::testing::RunOrDie;

std::string TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hysched_" + name);
  std::filesystem::remove_all(dir);
  return dir.string();
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CostModel FlatRate(double per_ms) {
  return *CostModel::Create({{128, per_ms}});
}

TEST(FingerprintTest, KnownFnv1aDigests) {
  EXPECT_EQ(Fingerprint(""), "cbf29ce484222325");
  EXPECT_EQ(Fingerprint("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(Fingerprint("foobar"), "85944171f73967e8");
}

TEST(AggregateTest, SingleTaskCost) {
  const double r = 2.5e-8;
  SimulationResult sim = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(10)}}),
                                  PolicyConfig::Defaults(PolicyKind::kFifo), 1);
  absl::StatusOr<RunReport> rep = Aggregate(sim, FlatRate(r));
  ASSERT_TRUE(rep.ok()) << rep.status();
  ASSERT_EQ(rep->tasks.size(), 1u);
  EXPECT_DOUBLE_EQ(rep->tasks[0].metrics.cost_usd, 10 * r);
  EXPECT_DOUBLE_EQ(rep->aggregates.total_cost_usd, 10 * r);
  EXPECT_EQ(rep->aggregates.execution.max, Millis(10));
  EXPECT_EQ(rep->censored, 0);
}

TaskRow Row(TaskId id, SimTime arrival, SimTime first, SimTime done,
            double cost) {
  TaskRow row;
  row.metrics = {id, done - first, first - arrival, done - arrival, cost};
  row.arrival = arrival;
  row.first_run = first;
  row.completion = done;
  row.demand = done - first;
  row.memory_mb = 128;
  return row;
}

TEST(AggregateTest, NinetyNinthOfHundredResponses) {
  std::vector<TaskRow> rows;
  for (int i = 1; i <= 100; ++i) {
    rows.push_back(Row(i, SimTime::Zero(), Millis(i), Millis(i + 1), 0.0));
  }
  absl::StatusOr<Aggregates> a = ComputeAggregates(rows);
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a->response.p99, Millis(99));
  EXPECT_EQ(a->response.p50, Millis(50));
  EXPECT_EQ(a->response.max, Millis(100));
  EXPECT_EQ(a->completed, 100);
}

TEST(AggregateTest, EmptyIsAnError) {
  EXPECT_EQ(ComputeAggregates({}).status().code(),
            absl::StatusCode::kFailedPrecondition);
  SimulationResult sim;
  EXPECT_FALSE(Aggregate(sim, CostModel::Default()).ok());
}

// Aggregates re-derived with an independent sort and integer rank.
TEST(AggregateTest, MatchesRecomputationOracle) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    SimulationResult sim =
        RunOrDie(RandomSmallWorkload(rng, 20),
                 PolicyConfig::Defaults(PolicyKind::kCfs), 2);
    absl::StatusOr<RunReport> rep = Aggregate(sim, CostModel::Default());
    ASSERT_TRUE(rep.ok());
    std::vector<int64_t> exec, resp, turn;
    double cost = 0.0;
    for (const Task& t : sim.tasks) {
      exec.push_back((*t.completion - *t.first_run).micros());
      resp.push_back((*t.first_run - t.arrival).micros());
      turn.push_back((*t.completion - t.arrival).micros());
      const int64_t ms = (exec.back() + 999) / 1000;
      cost += static_cast<double>(ms) *
              *CostModel::Default().PricePerMs(t.memory_mb);
    }
    auto q = [](std::vector<int64_t> v, int p) {
      std::sort(v.begin(), v.end());
      const size_t rank = (static_cast<size_t>(p) * v.size() + 99) / 100;
      return Micros(v[std::max<size_t>(rank, 1) - 1]);
    };
    EXPECT_EQ(rep->aggregates.execution.p50, q(exec, 50));
    EXPECT_EQ(rep->aggregates.execution.p90, q(exec, 90));
    EXPECT_EQ(rep->aggregates.response.p99, q(resp, 99));
    EXPECT_EQ(rep->aggregates.turnaround.max, q(turn, 100));
    EXPECT_NEAR(rep->aggregates.total_cost_usd, cost, 1e-12 * (1 + cost));
    EXPECT_EQ(*ComputeAggregates(rep->tasks), rep->aggregates);
  }
}

TEST(AggregateTest, CostIsAdditiveOverTasks) {
  std::mt19937_64 rng(14);
  SimulationResult sim = RunOrDie(RandomSmallWorkload(rng, 20),
                                  PolicyConfig::Defaults(PolicyKind::kRr), 3);
  absl::StatusOr<RunReport> rep = Aggregate(sim, CostModel::Default());
  ASSERT_TRUE(rep.ok());
  double sum = 0.0;
  for (const TaskRow& row : rep->tasks) sum += row.metrics.cost_usd;
  EXPECT_EQ(sum, rep->aggregates.total_cost_usd);
}

TEST(AggregateTest, CensoredTasksAreExcluded) {
  SimOptions opts;
  opts.horizon = Millis(15);
  SimulationResult sim =
      RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(10)},
                             {SimTime::Zero(), Millis(10)}}),
               PolicyConfig::Defaults(PolicyKind::kFifo), 1, opts);
  absl::StatusOr<RunReport> rep = Aggregate(sim, CostModel::Default());
  ASSERT_TRUE(rep.ok());
  EXPECT_EQ(rep->tasks.size(), 1u);
  EXPECT_EQ(rep->censored, 1);
  EXPECT_EQ(rep->aggregates.completed, 1);
}

TEST(AggregateTest, FullyCensoredRunReportsZeroAggregates) {
  SimOptions opts;
  opts.horizon = Millis(5);
  SimulationResult sim =
      RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(10)}}),
               PolicyConfig::Defaults(PolicyKind::kFifo), 1, opts);
  absl::StatusOr<RunReport> rep = Aggregate(sim, CostModel::Default());
  ASSERT_TRUE(rep.ok()) << rep.status();
  EXPECT_TRUE(rep->tasks.empty());
  EXPECT_EQ(rep->censored, 1);
  EXPECT_EQ(rep->aggregates, Aggregates{});
}

RunReport ReportFor(PolicyKind kind, const WorkloadSpec& w, int cores) {
  PolicyConfig c = PolicyConfig::Defaults(kind);
  c.fifo_cores = cores / 2;
  c.cfs_cores = cores - cores / 2;
  RunReport r = *Aggregate(RunOrDie(w, c, cores), CostModel::Default());
  r.policy = PolicyKindName(kind);
  r.run_id = r.policy;
  return r;
}

TEST(CompareTest, IdenticalReportsHaveUnitRatio) {
  std::mt19937_64 rng(15);
  WorkloadSpec w = RandomSmallWorkload(rng, 20);
  RunReport a = ReportFor(PolicyKind::kFifo, w, 2);
  RunReport b = a;
  b.run_id = "again";
  absl::StatusOr<Comparison> c = Compare({a, b});
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c->rows[0].cost_ratio, 1.0);
  EXPECT_EQ(c->rows[1].cost_ratio, 1.0);
}

TEST(CompareTest, RejectsMismatchedWorkloads) {
  std::mt19937_64 rng(16);
  RunReport a = ReportFor(PolicyKind::kFifo, RandomSmallWorkload(rng, 20), 2);
  WorkloadSpec other = MakeWorkload({{SimTime::Zero(), Millis(3)}});
  RunReport b = ReportFor(PolicyKind::kFifo, other, 2);
  ASSERT_NE(a.workload_hash, b.workload_hash);
  EXPECT_FALSE(Compare({a, b}).ok());
  EXPECT_FALSE(Compare({a}).ok());
}

TEST(CompareTest, SharingACoreInflatesCfsCost) {
  // Forty 100 ms tasks on one core: under CFS every task stays resident
  // for most of the run and is billed for it.
  std::vector<std::pair<SimTime, SimTime>> tasks(
      40, {SimTime::Zero(), Millis(100)});
  WorkloadSpec w = MakeWorkload(tasks);
  absl::StatusOr<Comparison> c = Compare(
      {ReportFor(PolicyKind::kFifo, w, 1), ReportFor(PolicyKind::kCfs, w, 1)});
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c->cheapest, 0u);
  EXPECT_GT(c->rows[1].cost_ratio, 3.0);
  const std::string csv = c->ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "run_id,policy,total_cost_usd,p99_resp_us,p99_exec_us,"
            "p99_turn_us,cost_ratio");
}

TEST(ExportTest, RoundTripsBitExact) {
  std::mt19937_64 rng(17);
  SimOptions opts;
  opts.monitor_period = Millis(5);
  PolicyConfig c = PolicyConfig::Defaults(PolicyKind::kHybrid);
  c.fifo_cores = 2;
  c.cfs_cores = 2;
  c.preempt_limit = Millis(8);
  absl::StatusOr<RunReport> rep = Aggregate(
      RunOrDie(RandomSmallWorkload(rng, 20), c, 4, opts), CostModel::Default());
  ASSERT_TRUE(rep.ok());
  rep->run_id = "r1";
  rep->policy = "hybrid";
  rep->config_hash = "0123456789abcdef";
  const std::string dir = TempDir("export");
  ASSERT_TRUE(ExportReport(*rep, dir).ok());

  absl::StatusOr<RunReport> back = ImportReport(dir);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->run_id, "r1");
  EXPECT_EQ(back->config_hash, rep->config_hash);
  EXPECT_EQ(back->workload_hash, rep->workload_hash);
  EXPECT_EQ(back->tasks, rep->tasks);
  EXPECT_EQ(back->aggregates, rep->aggregates);
  EXPECT_EQ(back->cores, rep->cores);
  ASSERT_EQ(back->utilization.size(), rep->utilization.size());
  for (size_t i = 0; i < rep->utilization.size(); ++i) {
    EXPECT_EQ(back->utilization[i].busy_fraction,
              rep->utilization[i].busy_fraction);
    EXPECT_EQ(back->utilization[i].group, rep->utilization[i].group);
  }
  // Writing the imported report again reproduces every byte.
  const std::string dir2 = TempDir("export2");
  ASSERT_TRUE(ExportReport(*back, dir2).ok());
  for (const char* f : {"tasks.csv", "util.csv", "summary.json"}) {
    EXPECT_EQ(Slurp(dir + "/" + f), Slurp(dir2 + "/" + f)) << f;
  }
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST(ExportTest, HeadersAreExact) {
  SimulationResult sim = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(1)}}),
                                  PolicyConfig::Defaults(PolicyKind::kFifo), 1);
  RunReport rep = *Aggregate(sim, CostModel::Default());
  const std::string tasks = TasksCsv(rep);
  EXPECT_EQ(tasks.substr(0, tasks.find('\n')), kTasksCsvHeader);
  EXPECT_EQ(std::string(kTasksCsvHeader),
            "task_id,arrival_us,first_run_us,completion_us,demand_us,"
            "memory_mb,preemptions,exec_us,resp_us,turn_us,cost_usd");
  EXPECT_EQ(std::string(kUtilCsvHeader),
            "window_start_us,core_id,busy_fraction,group");
}

TEST(ExportTest, EmptyUtilizationSeries) {
  SimulationResult sim = RunOrDie(MakeWorkload({{SimTime::Zero(), Millis(1)}}),
                                  PolicyConfig::Defaults(PolicyKind::kFifo), 1);
  RunReport rep = *Aggregate(sim, CostModel::Default());
  rep.utilization.clear();
  EXPECT_EQ(UtilCsv(rep), std::string(kUtilCsvHeader) + "\n");
  const std::string dir = TempDir("empty_util");
  ASSERT_TRUE(ExportReport(rep, dir).ok());
  absl::StatusOr<RunReport> back = ImportReport(dir);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_TRUE(back->utilization.empty());
  std::filesystem::remove_all(dir);
}

TEST(ExportTest, ImportDetectsTampering) {
  SimulationResult sim = RunOrDie(
      MakeWorkload({{SimTime::Zero(), Millis(4)}, {Millis(1), Millis(6)}}),
      PolicyConfig::Defaults(PolicyKind::kFifo), 1);
  RunReport rep = *Aggregate(sim, CostModel::Default());
  const std::string dir = TempDir("tamper");
  ASSERT_TRUE(ExportReport(rep, dir).ok());
  std::string tasks = Slurp(dir + "/tasks.csv");
  std::vector<std::string> lines = absl::StrSplit(tasks, '\n');
  // Row 1: bump the execution column.
  std::vector<std::string> f = absl::StrSplit(lines[1], ',');
  f[7] = "999999";
  lines[1] = absl::StrJoin(f, ",");
  std::ofstream(dir + "/tasks.csv", std::ios::binary | std::ios::trunc)
      << absl::StrJoin(lines, "\n");
  absl::StatusOr<RunReport> back = ImportReport(dir);
  EXPECT_FALSE(back.ok());
  std::filesystem::remove_all(dir);
  EXPECT_EQ(ImportReport(dir).status().code(), absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace hysched
