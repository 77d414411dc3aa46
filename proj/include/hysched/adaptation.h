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

#ifndef HYSCHED_ADAPTATION_H_
#define HYSCHED_ADAPTATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "hysched/core.h"
#include "hysched/policy.h"
#include "hysched/sim_time.h"

namespace hysched {

// Fixed-capacity ring of the most recent execution durations. The hybrid
// scheduler derives its preemption limit from a percentile of it.
class DurationWindow {
 public:
  explicit DurationWindow(int capacity = 100, double percentile = 95.0,
                          SimTime initial_limit = Millis(1633));

  void Push(SimTime duration);

  // Percentile of the window, or the initial limit while empty.
  SimTime Limit() const;

  size_t size() const { return ring_.size(); }
  int capacity() const { return capacity_; }
  double percentile() const { return percentile_; }
  // Oldest first.
  std::vector<SimTime> Contents() const;

 private:
  int capacity_;
  double percentile_;
  SimTime initial_limit_;
  std::vector<SimTime> ring_;
  size_t head_ = 0;  // slot of the oldest entry once full
};

// Busy fraction of every core over one window.
struct UtilizationSample {
  SimTime window_start;
  SimTime window_len;
  std::vector<double> busy_fraction;  // indexed by core id
  std::vector<GroupTag> group;        // group at sampling time
};

// `busy_at_start[i]` is core i's busy counter at window_start; the cores'
// counters must be current as of window_start + window_len.
absl::StatusOr<UtilizationSample> SampleUtilization(
    std::span<const Core> cores, std::span<const SimTime> busy_at_start,
    SimTime window_start, SimTime window_len);

// Mean busy fraction over the cores tagged `group`; 0 if there are none.
double GroupAverage(const UtilizationSample& sample, GroupTag group);

enum class RightsizeAction { kNoOp, kMoveToFifo, kMoveToCfs };

const char* RightsizeActionName(RightsizeAction action);

// One core moves from the under-utilized group to the busier one when the
// gap reaches the threshold, the donor stays above the floor and the
// cooldown since the last move has elapsed.
RightsizeAction DecideRightsize(double fifo_avg, double cfs_avg,
                                const RightsizeConfig& cfg, int fifo_cores,
                                int cfs_cores, bool cooldown_elapsed = true);

}  // namespace hysched

#endif  // HYSCHED_ADAPTATION_H_
