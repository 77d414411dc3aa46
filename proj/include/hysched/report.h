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

#ifndef HYSCHED_REPORT_H_
#define HYSCHED_REPORT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "hysched/adaptation.h"
#include "hysched/engine.h"
#include "hysched/metrics.h"
#include "hysched/sim_time.h"

namespace hysched {

// One completed task as written to tasks.csv.
struct TaskRow {
  MetricsRecord metrics;
  SimTime arrival;
  SimTime first_run;
  SimTime completion;
  SimTime demand;
  int32_t memory_mb = 0;
  int64_t preemptions = 0;

  friend bool operator==(const TaskRow&, const TaskRow&) = default;
};

struct Quantiles {
  SimTime p50;
  SimTime p90;
  SimTime p99;
  SimTime max;

  friend bool operator==(const Quantiles&, const Quantiles&) = default;
};

struct Aggregates {
  Quantiles execution;
  Quantiles response;
  Quantiles turnaround;
  double total_cost_usd = 0.0;
  int64_t completed = 0;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

struct CoreSummary {
  CoreId core = 0;
  GroupTag group = GroupTag::kNone;  // group at the end of the run
  int64_t preemptions = 0;           // slice/deadline/migration preemptions
  int64_t limit_expiries = 0;
  SimTime busy;

  friend bool operator==(const CoreSummary&, const CoreSummary&) = default;
};

struct RunReport {
  std::string run_id;
  std::string policy;
  std::string config_hash;
  std::string workload_hash;
  std::vector<TaskRow> tasks;  // completed tasks, ascending id
  Aggregates aggregates;
  std::vector<CoreSummary> cores;
  std::vector<UtilizationSample> utilization;
  int64_t censored = 0;
};

// Stable 64-bit FNV-1a digest, rendered as 16 hex digits.
std::string Fingerprint(absl::string_view bytes);

// Recomputes the aggregates from per-task rows; total cost is summed in
// row order.
absl::StatusOr<Aggregates> ComputeAggregates(const std::vector<TaskRow>& rows);

// Metrics and cost for every completed task. Errors if none completed.
absl::StatusOr<RunReport> Aggregate(const SimulationResult& result,
                                    const CostModel& model);

struct ComparisonRow {
  std::string run_id;
  std::string policy;
  double total_cost_usd = 0.0;
  SimTime p99_response;
  SimTime p99_execution;
  SimTime p99_turnaround;
  double cost_ratio = 1.0;  // relative to the cheapest report
};

struct Comparison {
  std::vector<ComparisonRow> rows;  // input order
  size_t cheapest = 0;

  std::string ToCsv() const;
};

// Needs at least two reports sharing one workload hash.
absl::StatusOr<Comparison> Compare(const std::vector<RunReport>& reports);

inline constexpr char kTasksCsvHeader[] =
    "task_id,arrival_us,first_run_us,completion_us,demand_us,memory_mb,"
    "preemptions,exec_us,resp_us,turn_us,cost_usd";
inline constexpr char kUtilCsvHeader[] =
    "window_start_us,core_id,busy_fraction,group";

std::string TasksCsv(const RunReport& report);
std::string UtilCsv(const RunReport& report);
std::string SummaryJson(const RunReport& report);

// Writes tasks.csv, util.csv and summary.json into `dir`, creating it.
absl::Status ExportReport(const RunReport& report, const std::string& dir);

// Reads the three files back. Aggregates are recomputed from tasks.csv and
// must match the ones stored in summary.json.
absl::StatusOr<RunReport> ImportReport(const std::string& dir);

}  // namespace hysched

#endif  // HYSCHED_REPORT_H_
