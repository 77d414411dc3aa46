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

#ifndef HYSCHED_METRICS_H_
#define HYSCHED_METRICS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "hysched/sim_time.h"
#include "hysched/task.h"

namespace hysched {

// Per-task metric triple plus the billed cost.
struct MetricsRecord {
  TaskId task_id = 0;
  SimTime execution;   // completion - first_run
  SimTime response;    // first_run - arrival
  SimTime turnaround;  // completion - arrival
  double cost_usd = 0.0;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

// Fails with FailedPrecondition if the task has not completed.
absl::StatusOr<MetricsRecord> TaskMetrics(const Task& task);

// Nearest-rank percentile: the element at index ceil(p/100 * n) - 1 of the
// ascending sort. p must lie in (0, 100].
absl::StatusOr<SimTime> Percentile(std::span<const SimTime> samples, double p);

// Index used by Percentile for a sample of size n. Exposed for callers that
// keep their own sorted copy.
size_t NearestRankIndex(size_t n, double p);

// Memory size -> price per millisecond billing table.
class CostModel {
 public:
  // Validates: non-empty, positive prices, price non-decreasing in memory.
  static absl::StatusOr<CostModel> Create(std::map<int32_t, double> table,
                                          int64_t granularity_ms = 1);

  // Public per-GB-second list price scaled linearly over 128..10240 MB.
  static CostModel Default();

  // Parses the text table format (see config/cost_table.csv).
  static absl::StatusOr<CostModel> Parse(absl::string_view text);
  static absl::StatusOr<CostModel> Load(const std::string& path);

  // Linear interpolation between keys; linear per-MB extrapolation above
  // the largest key. Memory below the smallest key is an error.
  absl::StatusOr<double> PricePerMs(int32_t memory_mb) const;

  const std::map<int32_t, double>& table() const { return table_; }
  int64_t granularity_ms() const { return granularity_ms_; }

  std::string Serialize() const;

 private:
  CostModel(std::map<int32_t, double> table, int64_t granularity_ms)
      : table_(std::move(table)), granularity_ms_(granularity_ms) {}

  std::map<int32_t, double> table_;
  int64_t granularity_ms_ = 1;
};

// Billed cost of one invocation: execution rounded up to the billing
// granularity, times the per-ms price at this memory size.
absl::StatusOr<double> InvocationCost(SimTime execution, int32_t memory_mb,
                                      const CostModel& model);

}  // namespace hysched

#endif  // HYSCHED_METRICS_H_
