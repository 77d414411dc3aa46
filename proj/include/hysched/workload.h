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

#ifndef HYSCHED_WORKLOAD_H_
#define HYSCHED_WORKLOAD_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "hysched/sim_time.h"

namespace hysched {

struct WorkloadEntry {
  SimTime iat;  // since the previous arrival; the first is since t=0
  SimTime demand;
  int32_t memory_mb = 128;

  bool operator==(const WorkloadEntry&) const = default;
};

struct WorkloadSpec {
  std::vector<WorkloadEntry> entries;
  std::string source = "unknown";
  int64_t scale = 1;
  uint64_t seed = 0;

  bool operator==(const WorkloadSpec&) const = default;

  // Absolute arrival times reconstructed from the IATs.
  std::vector<SimTime> Arrivals() const;
  SimTime TotalDemand() const;
};

// A discrete memory-size distribution: (memory_mb, weight) pairs.
using MemoryDistribution = std::vector<std::pair<int32_t, double>>;

MemoryDistribution DefaultMemoryDistribution();

// ---------------------------------------------------------------------------
// Trace ingestion.

// Invocation counts per minute for one (bucketed) duration.
struct TraceRow {
  double duration_ms = 0.0;
  std::string label;  // bucket label, or the duration itself unbucketed
  std::vector<int64_t> counts;

  int64_t Total() const;
};

struct TraceTable {
  std::vector<TraceRow> rows;  // ascending duration
  int minutes = 1440;

  int64_t TotalInvocations() const;
};

// Calibrated duration buckets: (label, duration_ms), from `bucket_label,
// duration_ms` rows.
struct Bucket {
  std::string label;
  double duration_ms = 0.0;
};
absl::StatusOr<std::vector<Bucket>> ParseBuckets(absl::string_view csv);

struct IngestOptions {
  // Durations above this are treated as garbage.
  double max_duration_ms = 15.0 * 60.0 * 1000.0;
  // Per-minute counts above this are treated as garbage.
  int64_t max_count_per_minute = 100'000'000;
  int minutes = 1440;
};

// Joins a duration table (HashOwner,HashApp,HashFunction,...,Average,...)
// with an invocation table (HashOwner,HashApp,HashFunction,Trigger,1..1440)
// on the three hash columns, drops garbage rows, groups by unique duration
// and, when buckets are given, merges rows by nearest bucket.
absl::StatusOr<TraceTable> IngestTrace(absl::string_view durations_csv,
                                       absl::string_view invocations_csv,
                                       const std::vector<Bucket>& buckets = {},
                                       const IngestOptions& options = {});

struct DeriveOptions {
  int64_t scale = 100;
  int first_minute = 0;
  int num_minutes = 2;
  MemoryDistribution memory = DefaultMemoryDistribution();
  uint64_t seed = 1;
};

// Downscales the per-minute counts, spaces each row's invocations evenly
// over its minute, merges all rows and converts arrivals to IATs.
absl::StatusOr<WorkloadSpec> DeriveIat(const TraceTable& trace,
                                       const DeriveOptions& options);

// ---------------------------------------------------------------------------
// Synthetic generator.

// Defaults describe the reference workload used by the acceptance suite.
struct SynthParams {
  int64_t n_tasks = 12442;
  double short_fraction = 0.8;
  // Short demands are log-uniform in [lo, hi); hi must be <= 1 s.
  std::pair<SimTime, SimTime> short_range = {Millis(10), Seconds(1)};
  // Tail demands follow a Pareto law truncated to [lo, hi].
  std::pair<SimTime, SimTime> tail_range = {Seconds(1), Seconds(120)};
  double tail_alpha = 1.3;
  // Arrivals span [0, span). Spike episodes run at `burst_factor` times the
  // baseline rate and cover roughly `burst_share` of the span.
  SimTime span = Seconds(120);
  double burst_factor = 20.0;
  double burst_share = 0.05;
  SimTime mean_burst_len = Seconds(3);
  MemoryDistribution memory = DefaultMemoryDistribution();
  uint64_t seed = 7;
};

absl::StatusOr<WorkloadSpec> Synthesize(const SynthParams& params);

// ---------------------------------------------------------------------------
// Workload file: optional '#' metadata line, the header
// `iat_us,demand_us,memory_mb`, then one row per invocation.

std::string SerializeWorkload(const WorkloadSpec& spec);
absl::StatusOr<WorkloadSpec> ParseWorkload(absl::string_view text);
absl::Status WriteWorkload(const WorkloadSpec& spec, const std::string& path);
absl::StatusOr<WorkloadSpec> ReadWorkload(const std::string& path);

// Duration summary written next to generated workloads.
struct WorkloadStats {
  int64_t count = 0;
  double fraction_below_1s = 0.0;
  SimTime p50, p80, p90, p99, max;
  SimTime span;
  SimTime total_demand;
};
WorkloadStats ComputeStats(const WorkloadSpec& spec);
std::string StatsJson(const WorkloadStats& stats);

}  // namespace hysched

#endif  // HYSCHED_WORKLOAD_H_
