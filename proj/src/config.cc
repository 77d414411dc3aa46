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

#include "hysched/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/time/time.h"
#include "hysched/report.h"

namespace hysched {
namespace {

std::string FormatDouble(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

std::string FormatDuration(SimTime t) {
  if (t.is_infinite()) return "inf";
  const int64_t us = t.micros();
  if (us != 0 && us % 1'000'000 == 0) return absl::StrCat(us / 1'000'000, "s");
  if (us != 0 && us % 1'000 == 0) return absl::StrCat(us / 1'000, "ms");
  return absl::StrCat(us, "us");
}

absl::Status BadValue(absl::string_view key, absl::string_view value,
                      absl::string_view want) {
  return absl::InvalidArgumentError(
      absl::StrCat(key, ": cannot parse '", value, "' as ", want));
}

absl::Status ParseDurationValue(absl::string_view key, absl::string_view v,
                                SimTime* out) {
  absl::Duration d;
  if (!absl::ParseDuration(v, &d) || d < absl::ZeroDuration()) {
    return BadValue(key, v, "a duration such as 750us, 6ms or 1.5s");
  }
  *out = Micros(absl::ToInt64Microseconds(d));
  return absl::OkStatus();
}

template <typename Int>
absl::Status ParseIntValue(absl::string_view key, absl::string_view v,
                           Int* out) {
  if (!absl::SimpleAtoi(v, out)) return BadValue(key, v, "an integer");
  return absl::OkStatus();
}

absl::Status ParseDoubleValue(absl::string_view key, absl::string_view v,
                              double* out) {
  if (!absl::SimpleAtod(v, out)) return BadValue(key, v, "a number");
  return absl::OkStatus();
}

absl::Status ParseBoolValue(absl::string_view key, absl::string_view v,
                            bool* out) {
  if (!absl::SimpleAtob(v, out)) return BadValue(key, v, "true or false");
  return absl::OkStatus();
}

absl::Status ParseMemory(absl::string_view key, absl::string_view v,
                         MemoryDistribution* out) {
  MemoryDistribution dist;
  for (absl::string_view item : absl::StrSplit(v, ',', absl::SkipEmpty())) {
    std::pair<std::string, std::string> kv = absl::StrSplit(item, ':');
    int32_t mb = 0;
    double w = 0;
    if (!absl::SimpleAtoi(kv.first, &mb) || !absl::SimpleAtod(kv.second, &w)) {
      return BadValue(key, v, "a list like 128:0.35,256:0.65");
    }
    dist.emplace_back(mb, w);
  }
  *out = std::move(dist);
  return absl::OkStatus();
}

// "a..b": minutes [a, b).
absl::Status ParseMinutes(absl::string_view key, absl::string_view v,
                          int* first, int* count) {
  std::vector<absl::string_view> parts = absl::StrSplit(v, "..");
  int a = 0, b = 0;
  if (parts.size() != 2 || !absl::SimpleAtoi(parts[0], &a) ||
      !absl::SimpleAtoi(parts[1], &b) || a < 0 || b <= a) {
    return BadValue(key, v, "a minute range a..b with 0 <= a < b");
  }
  *first = a;
  *count = b - a;
  return absl::OkStatus();
}

const char* SourceName(WorkloadSource s) {
  switch (s) {
    case WorkloadSource::kSynthetic:
      return "synthetic";
    case WorkloadSource::kTrace:
      return "trace";
    case WorkloadSource::kFile:
      return "file";
  }
  return "synthetic";
}

struct Field {
  std::function<absl::Status(ExperimentConfig&, absl::string_view key,
                             absl::string_view value)>
      set;
  std::function<std::string(const ExperimentConfig&)> get;
};

// Ordered so that Serialize() emits sections in this order.
const std::vector<std::pair<std::string, Field>>& Fields() {
  using C = ExperimentConfig;
  using V = absl::string_view;
  static const auto* fields = new std::vector<std::pair<std::string, Field>>{
      {"workload.source",
       {[](C& c, V k, V v) {
          if (v == "synthetic") {
            c.source = WorkloadSource::kSynthetic;
          } else if (v == "trace") {
            c.source = WorkloadSource::kTrace;
          } else if (v == "file") {
            c.source = WorkloadSource::kFile;
          } else {
            return BadValue(k, v, "synthetic, trace or file");
          }
          return absl::OkStatus();
        },
        [](const C& c) { return std::string(SourceName(c.source)); }}},
      {"workload.path",
       {[](C& c, V, V v) {
          c.workload_path = std::string(v);
          return absl::OkStatus();
        },
        [](const C& c) { return c.workload_path; }}},
      {"workload.durations",
       {[](C& c, V, V v) {
          c.durations_csv = std::string(v);
          return absl::OkStatus();
        },
        [](const C& c) { return c.durations_csv; }}},
      {"workload.invocations",
       {[](C& c, V, V v) {
          c.invocations_csv = std::string(v);
          return absl::OkStatus();
        },
        [](const C& c) { return c.invocations_csv; }}},
      {"workload.buckets",
       {[](C& c, V, V v) {
          c.buckets_csv = std::string(v);
          return absl::OkStatus();
        },
        [](const C& c) { return c.buckets_csv; }}},
      {"workload.scale",
       {[](C& c, V k, V v) { return ParseIntValue(k, v, &c.scale); },
        [](const C& c) { return absl::StrCat(c.scale); }}},
      {"workload.minutes",
       {[](C& c, V k, V v) {
          return ParseMinutes(k, v, &c.first_minute, &c.num_minutes);
        },
        [](const C& c) {
          return absl::StrCat(c.first_minute, "..",
                              c.first_minute + c.num_minutes);
        }}},
      {"workload.n",
       {[](C& c, V k, V v) { return ParseIntValue(k, v, &c.synth.n_tasks); },
        [](const C& c) { return absl::StrCat(c.synth.n_tasks); }}},
      {"workload.seed",
       {[](C& c, V k, V v) { return ParseIntValue(k, v, &c.synth.seed); },
        [](const C& c) { return absl::StrCat(c.synth.seed); }}},
      {"workload.short_fraction",
       {[](C& c, V k, V v) {
          return ParseDoubleValue(k, v, &c.synth.short_fraction);
        },
        [](const C& c) { return FormatDouble(c.synth.short_fraction); }}},
      {"workload.short_lo",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.synth.short_range.first);
        },
        [](const C& c) { return FormatDuration(c.synth.short_range.first); }}},
      {"workload.short_hi",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.synth.short_range.second);
        },
        [](const C& c) { return FormatDuration(c.synth.short_range.second); }}},
      {"workload.tail_lo",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.synth.tail_range.first);
        },
        [](const C& c) { return FormatDuration(c.synth.tail_range.first); }}},
      {"workload.tail_hi",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.synth.tail_range.second);
        },
        [](const C& c) { return FormatDuration(c.synth.tail_range.second); }}},
      {"workload.tail_alpha",
       {[](C& c, V k, V v) {
          return ParseDoubleValue(k, v, &c.synth.tail_alpha);
        },
        [](const C& c) { return FormatDouble(c.synth.tail_alpha); }}},
      {"workload.span",
       {[](C& c, V k, V v) { return ParseDurationValue(k, v, &c.synth.span); },
        [](const C& c) { return FormatDuration(c.synth.span); }}},
      {"workload.burst_factor",
       {[](C& c, V k, V v) {
          return ParseDoubleValue(k, v, &c.synth.burst_factor);
        },
        [](const C& c) { return FormatDouble(c.synth.burst_factor); }}},
      {"workload.burst_share",
       {[](C& c, V k, V v) {
          return ParseDoubleValue(k, v, &c.synth.burst_share);
        },
        [](const C& c) { return FormatDouble(c.synth.burst_share); }}},
      {"workload.mean_burst_len",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.synth.mean_burst_len);
        },
        [](const C& c) { return FormatDuration(c.synth.mean_burst_len); }}},
      {"workload.memory",
       {[](C& c, V k, V v) { return ParseMemory(k, v, &c.synth.memory); },
        [](const C& c) {
          return absl::StrJoin(
              c.synth.memory, ",", [](std::string* out, const auto& p) {
                absl::StrAppend(out, p.first, ":", FormatDouble(p.second));
              });
        }}},
      {"engine.enclave_cores",
       {[](C& c, V k, V v) { return ParseIntValue(k, v, &c.enclave_cores); },
        [](const C& c) { return absl::StrCat(c.enclave_cores); }}},
      {"engine.monitor_period",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.monitor_period);
        },
        [](const C& c) { return FormatDuration(c.monitor_period); }}},
      {"engine.horizon",
       {[](C& c, V k, V v) { return ParseDurationValue(k, v, &c.horizon); },
        [](const C& c) { return FormatDuration(c.horizon); }}},
      {"policy.kind",
       {[](C& c, V, V v) -> absl::Status {
          absl::StatusOr<PolicyKind> kind = ParsePolicyKind(v);
          if (!kind.ok()) return kind.status();
          c.policy.kind = *kind;
          return absl::OkStatus();
        },
        [](const C& c) { return std::string(PolicyKindName(c.policy.kind)); }}},
      {"policy.slice",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.policy.slice);
        },
        [](const C& c) { return FormatDuration(c.policy.slice); }}},
      {"policy.min_granularity",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.policy.min_granularity);
        },
        [](const C& c) { return FormatDuration(c.policy.min_granularity); }}},
      {"policy.preempt_limit",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.policy.preempt_limit);
        },
        [](const C& c) { return FormatDuration(c.policy.preempt_limit); }}},
      {"policy.ctx_switch_overhead",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.policy.ctx_switch_overhead);
        },
        [](const C& c) {
          return FormatDuration(c.policy.ctx_switch_overhead);
        }}},
      {"policy.deadline_offset",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.policy.deadline_offset);
        },
        [](const C& c) { return FormatDuration(c.policy.deadline_offset); }}},
      {"hybrid.fifo_cores",
       {[](C& c, V k, V v) {
          return ParseIntValue(k, v, &c.policy.fifo_cores);
        },
        [](const C& c) { return absl::StrCat(c.policy.fifo_cores); }}},
      {"hybrid.cfs_cores",
       {[](C& c, V k, V v) { return ParseIntValue(k, v, &c.policy.cfs_cores); },
        [](const C& c) { return absl::StrCat(c.policy.cfs_cores); }}},
      {"adapt.enabled",
       {[](C& c, V k, V v) {
          return ParseBoolValue(k, v, &c.policy.adapt.enabled);
        },
        [](const C& c) {
          return std::string(c.policy.adapt.enabled ? "true" : "false");
        }}},
      {"adapt.percentile",
       {[](C& c, V k, V v) {
          return ParseDoubleValue(k, v, &c.policy.adapt.percentile);
        },
        [](const C& c) { return FormatDouble(c.policy.adapt.percentile); }}},
      {"adapt.window",
       {[](C& c, V k, V v) {
          return ParseIntValue(k, v, &c.policy.adapt.window);
        },
        [](const C& c) { return absl::StrCat(c.policy.adapt.window); }}},
      {"rightsize.enabled",
       {[](C& c, V k, V v) {
          return ParseBoolValue(k, v, &c.policy.rightsize.enabled);
        },
        [](const C& c) {
          return std::string(c.policy.rightsize.enabled ? "true" : "false");
        }}},
      {"rightsize.util_threshold",
       {[](C& c, V k, V v) {
          return ParseDoubleValue(k, v, &c.policy.rightsize.util_threshold);
        },
        [](const C& c) {
          return FormatDouble(c.policy.rightsize.util_threshold);
        }}},
      {"rightsize.check_period",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.policy.rightsize.check_period);
        },
        [](const C& c) {
          return FormatDuration(c.policy.rightsize.check_period);
        }}},
      {"rightsize.min_group_size",
       {[](C& c, V k, V v) {
          return ParseIntValue(k, v, &c.policy.rightsize.min_group_size);
        },
        [](const C& c) {
          return absl::StrCat(c.policy.rightsize.min_group_size);
        }}},
      {"rightsize.cooldown",
       {[](C& c, V k, V v) {
          return ParseDurationValue(k, v, &c.policy.rightsize.cooldown);
        },
        [](const C& c) {
          return FormatDuration(c.policy.rightsize.cooldown);
        }}},
      {"cost.table",
       {[](C& c, V, V v) {
          c.cost_table = std::string(v);
          return absl::OkStatus();
        },
        [](const C& c) { return c.cost_table; }}},
      {"output.dir",
       {[](C& c, V, V v) {
          c.output_dir = std::string(v);
          return absl::OkStatus();
        },
        [](const C& c) { return c.output_dir; }}},
  };
  return *fields;
}

const Field* FindField(absl::string_view key) {
  for (const auto& [name, field] : Fields()) {
    if (name == key) return &field;
  }
  return nullptr;
}

absl::StatusOr<std::string> Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

absl::Status ExperimentConfig::Set(absl::string_view key,
                                   absl::string_view value) {
  const Field* f = FindField(key);
  if (f == nullptr) {
    return absl::InvalidArgumentError(absl::StrCat("unknown key '", key, "'"));
  }
  return f->set(*this, key, absl::StripAsciiWhitespace(value));
}

absl::StatusOr<std::string> ExperimentConfig::Get(absl::string_view key) const {
  const Field* f = FindField(key);
  if (f == nullptr) {
    return absl::InvalidArgumentError(absl::StrCat("unknown key '", key, "'"));
  }
  return f->get(*this);
}

std::vector<std::string> ExperimentConfig::Keys() {
  std::vector<std::string> keys;
  for (const auto& [name, field] : Fields()) keys.push_back(name);
  return keys;
}

absl::Status ExperimentConfig::Validate() const {
  switch (source) {
    case WorkloadSource::kFile:
      if (workload_path.empty()) {
        return absl::InvalidArgumentError(
            "workload.path is required for source = file");
      }
      break;
    case WorkloadSource::kTrace:
      if (durations_csv.empty() || invocations_csv.empty()) {
        return absl::InvalidArgumentError(
            "workload.durations and workload.invocations are required for "
            "source = trace");
      }
      if (scale < 1) {
        return absl::InvalidArgumentError("workload.scale must be >= 1");
      }
      break;
    case WorkloadSource::kSynthetic:
      break;
  }
  if (monitor_period.micros() <= 0) {
    return absl::InvalidArgumentError("engine.monitor_period must be > 0");
  }
  return policy.Validate(enclave_cores);
}

std::string ExperimentConfig::Serialize() const {
  std::string out;
  std::string section;
  for (const auto& [name, field] : Fields()) {
    const size_t dot = name.find('.');
    const std::string sec = name.substr(0, dot);
    if (sec != section) {
      absl::StrAppend(&out, section.empty() ? "" : "\n", "[", sec, "]\n");
      section = sec;
    }
    absl::StrAppend(&out, name.substr(dot + 1), " = ", field.get(*this), "\n");
  }
  return out;
}

std::string ExperimentConfig::Hash() const {
  ExperimentConfig copy = *this;
  copy.output_dir.clear();
  return Fingerprint(copy.Serialize());
}

absl::StatusOr<ExperimentConfig> ParseConfig(absl::string_view text) {
  ExperimentConfig config;
  std::string section;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_no, ": malformed section header"));
      }
      section = std::string(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected key = value"));
    }
    if (section.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": key outside any section"));
    }
    const std::string key = absl::StrCat(
        section, ".", absl::StripAsciiWhitespace(line.substr(0, eq)));
    if (absl::Status s = config.Set(key, line.substr(eq + 1)); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", s.message()));
    }
  }
  return config;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const std::string& path) {
  absl::StatusOr<std::string> text = Slurp(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<ExperimentConfig> config = ParseConfig(*text);
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

absl::StatusOr<WorkloadSpec> BuildWorkload(const ExperimentConfig& config) {
  switch (config.source) {
    case WorkloadSource::kSynthetic:
      return Synthesize(config.synth);
    case WorkloadSource::kFile:
      return ReadWorkload(config.workload_path);
    case WorkloadSource::kTrace: {
      absl::StatusOr<std::string> durations = Slurp(config.durations_csv);
      if (!durations.ok()) return durations.status();
      absl::StatusOr<std::string> invocations = Slurp(config.invocations_csv);
      if (!invocations.ok()) return invocations.status();
      std::vector<Bucket> buckets;
      if (!config.buckets_csv.empty()) {
        absl::StatusOr<std::string> text = Slurp(config.buckets_csv);
        if (!text.ok()) return text.status();
        absl::StatusOr<std::vector<Bucket>> parsed = ParseBuckets(*text);
        if (!parsed.ok()) return parsed.status();
        buckets = *std::move(parsed);
      }
      absl::StatusOr<TraceTable> table =
          IngestTrace(*durations, *invocations, buckets);
      if (!table.ok()) return table.status();
      DeriveOptions opts;
      opts.scale = config.scale;
      opts.first_minute = config.first_minute;
      opts.num_minutes = config.num_minutes;
      opts.memory = config.synth.memory;
      opts.seed = config.synth.seed;
      return DeriveIat(*table, opts);
    }
  }
  return absl::InvalidArgumentError("unknown workload source");
}

}  // namespace hysched
