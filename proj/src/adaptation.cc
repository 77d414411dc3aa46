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

#include "hysched/adaptation.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "hysched/metrics.h"

namespace hysched {

DurationWindow::DurationWindow(int capacity, double percentile,
                               SimTime initial_limit)
    : capacity_(std::max(capacity, 1)),
      percentile_(percentile),
      initial_limit_(initial_limit) {
  ring_.reserve(static_cast<size_t>(capacity_));
}

void DurationWindow::Push(SimTime duration) {
  if (ring_.size() < static_cast<size_t>(capacity_)) {
    ring_.push_back(duration);
    return;
  }
  ring_[head_] = duration;
  head_ = (head_ + 1) % ring_.size();
}

SimTime DurationWindow::Limit() const {
  if (ring_.empty()) return initial_limit_;
  return *Percentile(ring_, percentile_);
}

std::vector<SimTime> DurationWindow::Contents() const {
  std::vector<SimTime> out;
  out.reserve(ring_.size());
  for (size_t i = 0; i < ring_.size(); ++i) {
    out.push_back(ring_[(head_ + i) % ring_.size()]);
  }
  return out;
}

absl::StatusOr<UtilizationSample> SampleUtilization(
    std::span<const Core> cores, std::span<const SimTime> busy_at_start,
    SimTime window_start, SimTime window_len) {
  if (window_len.micros() <= 0) {
    return absl::InvalidArgumentError("utilization window has zero length");
  }
  if (busy_at_start.size() != cores.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("busy snapshot has ", busy_at_start.size(),
                     " entries for ", cores.size(), " cores"));
  }
  UtilizationSample s;
  s.window_start = window_start;
  s.window_len = window_len;
  s.busy_fraction.reserve(cores.size());
  s.group.reserve(cores.size());
  const double len = static_cast<double>(window_len.micros());
  for (size_t i = 0; i < cores.size(); ++i) {
    double busy =
        static_cast<double>((cores[i].busy - busy_at_start[i]).micros());
    s.busy_fraction.push_back(std::clamp(busy / len, 0.0, 1.0));
    s.group.push_back(cores[i].group);
  }
  return s;
}

double GroupAverage(const UtilizationSample& sample, GroupTag group) {
  double sum = 0.0;
  int n = 0;
  for (size_t i = 0; i < sample.busy_fraction.size(); ++i) {
    if (sample.group[i] != group) continue;
    sum += sample.busy_fraction[i];
    ++n;
  }
  return n == 0 ? 0.0 : sum / n;
}

const char* RightsizeActionName(RightsizeAction action) {
  switch (action) {
    case RightsizeAction::kMoveToFifo:
      return "move_to_fifo";
    case RightsizeAction::kMoveToCfs:
      return "move_to_cfs";
    case RightsizeAction::kNoOp:
      break;
  }
  return "noop";
}

RightsizeAction DecideRightsize(double fifo_avg, double cfs_avg,
                                const RightsizeConfig& cfg, int fifo_cores,
                                int cfs_cores, bool cooldown_elapsed) {
  if (!cooldown_elapsed) return RightsizeAction::kNoOp;
  // The tolerance keeps decimal thresholds such as 0.70 - 0.50 >= 0.20 true
  // in binary floating point.
  if (std::abs(fifo_avg - cfs_avg) + 1e-9 < cfg.util_threshold) {
    return RightsizeAction::kNoOp;
  }
  if (fifo_avg > cfs_avg) {
    return cfs_cores > cfg.min_group_size ? RightsizeAction::kMoveToFifo
                                          : RightsizeAction::kNoOp;
  }
  return fifo_cores > cfg.min_group_size ? RightsizeAction::kMoveToCfs
                                         : RightsizeAction::kNoOp;
}

}  // namespace hysched
