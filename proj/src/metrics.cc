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

#include "hysched/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace hysched {

const char* GroupTagName(GroupTag tag) {
  switch (tag) {
    case GroupTag::kFifo:
      return "fifo";
    case GroupTag::kCfs:
      return "cfs";
    case GroupTag::kNone:
      break;
  }
  return "none";
}

absl::StatusOr<MetricsRecord> TaskMetrics(const Task& task) {
  if (!task.completion.has_value() || !task.first_run.has_value()) {
    return absl::FailedPreconditionError(
        absl::StrCat("task ", task.id, " has not completed"));
  }
  MetricsRecord r;
  r.task_id = task.id;
  r.execution = *task.completion - *task.first_run;
  r.response = *task.first_run - task.arrival;
  r.turnaround = *task.completion - task.arrival;
  return r;
}

size_t NearestRankIndex(size_t n, double p) {
  // p * n / 100 keeps integer percentiles exact for any n.
  double rank = std::ceil(p * static_cast<double>(n) / 100.0 - 1e-9);
  if (rank < 1.0) rank = 1.0;
  size_t idx = static_cast<size_t>(rank) - 1;
  return std::min(idx, n - 1);
}

absl::StatusOr<SimTime> Percentile(std::span<const SimTime> samples, double p) {
  if (samples.empty()) {
    return absl::InvalidArgumentError("percentile of an empty sample");
  }
  if (!(p > 0.0 && p <= 100.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("percentile %g outside (0, 100]", p));
  }
  std::vector<SimTime> copy(samples.begin(), samples.end());
  size_t idx = NearestRankIndex(copy.size(), p);
  std::nth_element(copy.begin(), copy.begin() + idx, copy.end());
  return copy[idx];
}

absl::StatusOr<CostModel> CostModel::Create(std::map<int32_t, double> table,
                                            int64_t granularity_ms) {
  if (table.empty()) {
    return absl::InvalidArgumentError("cost table is empty");
  }
  if (granularity_ms < 1) {
    return absl::InvalidArgumentError("granularity_ms must be >= 1");
  }
  double prev = 0.0;
  for (const auto& [mem, price] : table) {
    if (mem <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("memory size ", mem, " must be positive"));
    }
    if (!(price > 0.0) || !std::isfinite(price)) {
      return absl::InvalidArgumentError(
          absl::StrCat("price for ", mem, " MB must be positive"));
    }
    if (price < prev) {
      return absl::InvalidArgumentError(absl::StrCat(
          "price decreases at ", mem, " MB; table must be monotone"));
    }
    prev = price;
  }
  return CostModel(std::move(table), granularity_ms);
}

CostModel CostModel::Default() {
  // USD per GB-second, converted to per-MB-ms.
  constexpr double kPerGbSecond = 0.0000166667;
  constexpr double kPerMbMs = kPerGbSecond / 1024.0 / 1000.0;
  std::map<int32_t, double> table;
  for (int32_t mem : {128, 10240}) table[mem] = kPerMbMs * mem;
  return CostModel(std::move(table), 1);
}

absl::StatusOr<CostModel> CostModel::Parse(absl::string_view text) {
  std::map<int32_t, double> table;
  int64_t granularity = 1;
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<absl::string_view> parts =
        absl::StrSplit(line, absl::ByAnyChar(",="));
    if (parts.size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost table line ", line_no, ": expected two fields"));
    }
    absl::string_view key = absl::StripAsciiWhitespace(parts[0]);
    absl::string_view value = absl::StripAsciiWhitespace(parts[1]);
    if (key == "granularity_ms") {
      if (!absl::SimpleAtoi(value, &granularity)) {
        return absl::InvalidArgumentError(
            absl::StrCat("cost table line ", line_no, ": bad granularity_ms"));
      }
      continue;
    }
    if (key == "memory_mb") continue;  // column header
    int32_t mem = 0;
    double price = 0.0;
    if (!absl::SimpleAtoi(key, &mem) || !absl::SimpleAtod(value, &price)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cost table line ", line_no, ": non-numeric row"));
    }
    if (!table.emplace(mem, price).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          "cost table line ", line_no, ": duplicate memory size ", mem));
    }
  }
  return Create(std::move(table), granularity);
}

absl::StatusOr<CostModel> CostModel::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

absl::StatusOr<double> CostModel::PricePerMs(int32_t memory_mb) const {
  auto first = table_.begin();
  if (memory_mb < first->first) {
    return absl::OutOfRangeError(absl::StrCat(
        memory_mb, " MB is below the smallest priced size ", first->first));
  }
  auto hi = table_.lower_bound(memory_mb);
  if (hi != table_.end() && hi->first == memory_mb) return hi->second;
  if (hi == table_.end()) {
    auto last = std::prev(table_.end());
    return last->second * static_cast<double>(memory_mb) / last->first;
  }
  auto lo = std::prev(hi);
  double frac = static_cast<double>(memory_mb - lo->first) /
                static_cast<double>(hi->first - lo->first);
  return lo->second + frac * (hi->second - lo->second);
}

std::string CostModel::Serialize() const {
  std::string out = absl::StrCat("granularity_ms = ", granularity_ms_,
                                 "\nmemory_mb,price_per_ms_usd\n");
  for (const auto& [mem, price] : table_) {
    absl::StrAppend(&out, mem, ",", absl::StrFormat("%.17g", price), "\n");
  }
  return out;
}

absl::StatusOr<double> InvocationCost(SimTime execution, int32_t memory_mb,
                                      const CostModel& model) {
  absl::StatusOr<double> price = model.PricePerMs(memory_mb);
  if (!price.ok()) return price.status();
  if (execution.micros() <= 0) return 0.0;
  const int64_t unit_us = model.granularity_ms() * 1000;
  const int64_t units = (execution.micros() + unit_us - 1) / unit_us;
  return static_cast<double>(units * model.granularity_ms()) * *price;
}

}  // namespace hysched
