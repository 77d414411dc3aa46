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

#ifndef HYSCHED_CONFIG_H_
#define HYSCHED_CONFIG_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "hysched/engine.h"
#include "hysched/policy.h"
#include "hysched/workload.h"

namespace hysched {

enum class WorkloadSource { kSynthetic, kTrace, kFile };

// Everything one experiment needs. The text form is INI-like:
//
//   [policy]
//   kind = hybrid
//   fifo_cores = 25
//
// Keys are addressed as `section.key` for flag overrides.
struct ExperimentConfig {
  WorkloadSource source = WorkloadSource::kSynthetic;
  SynthParams synth;
  std::string workload_path;    // kFile
  std::string durations_csv;    // kTrace
  std::string invocations_csv;  // kTrace
  std::string buckets_csv;      // kTrace, optional
  int64_t scale = 100;
  int first_minute = 0;
  int num_minutes = 2;

  int enclave_cores = 50;
  SimTime monitor_period = Millis(100);
  SimTime horizon;  // zero: run until every task completes
  PolicyConfig policy = PolicyConfig::Defaults(PolicyKind::kHybrid);

  std::string cost_table;  // empty: built-in list price
  std::string output_dir = "out";

  // Sets one `section.key` to a textual value.
  absl::Status Set(absl::string_view key, absl::string_view value);
  absl::StatusOr<std::string> Get(absl::string_view key) const;

  // Field-named messages for every violated constraint.
  absl::Status Validate() const;

  // Canonical text listing every key; Parse(Serialize()) round-trips.
  std::string Serialize() const;

  // Fingerprint of Serialize() minus the output directory.
  std::string Hash() const;

  static std::vector<std::string> Keys();
};

absl::StatusOr<ExperimentConfig> ParseConfig(absl::string_view text);
absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path);

// Builds the workload the config describes.
absl::StatusOr<WorkloadSpec> BuildWorkload(const ExperimentConfig& config);

}  // namespace hysched

#endif  // HYSCHED_CONFIG_H_
