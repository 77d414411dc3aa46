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

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "hysched/config.h"
#include "hysched/engine.h"
#include "hysched/metrics.h"
#include "hysched/report.h"
#include "hysched/workload.h"
#include "hysched_c.h"

struct hs_config {
  hysched::ExperimentConfig config;
};

struct hs_workload {
  hysched::WorkloadSpec spec;
};

struct hs_report {
  hysched::RunReport report;
  int64_t end_time_us = 0;
  int64_t migrations = 0;
};

namespace {

thread_local std::string last_error;

hs_status Fail(const absl::Status& s) {
  last_error = s.ToString();
  switch (s.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return HS_INVALID_ARGUMENT;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
      return HS_IO_ERROR;
    case absl::StatusCode::kFailedPrecondition:
      return HS_FAILED_PRECONDITION;
    default:
      return HS_INTERNAL;
  }
}

hs_status Check(const absl::Status& s) {
  if (s.ok()) return HS_OK;
  return Fail(s);
}

hs_status NullArg(const char* name) {
  return Fail(
      absl::InvalidArgumentError(std::string(name) + " must not be null"));
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hs_quantiles ToC(const hysched::Quantiles& q) {
  return hs_quantiles{q.p50.micros(), q.p90.micros(), q.p99.micros(),
                      q.max.micros()};
}

}  // namespace

extern "C" {

const char* hs_last_error(void) { return last_error.c_str(); }

const char* hs_version(void) { return "0.1.0"; }

void hs_string_free(char* s) { std::free(s); }

hs_status hs_config_new(hs_config** out) {
  if (out == nullptr) return NullArg("out");
  *out = new hs_config();
  return HS_OK;
}

hs_status hs_config_load(const char* path, hs_config** out) {
  if (path == nullptr) return NullArg("path");
  if (out == nullptr) return NullArg("out");
  absl::StatusOr<hysched::ExperimentConfig> c = hysched::LoadConfig(path);
  if (!c.ok()) return Fail(c.status());
  *out = new hs_config{*std::move(c)};
  return HS_OK;
}

hs_status hs_config_clone(const hs_config* config, hs_config** out) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  *out = new hs_config(*config);
  return HS_OK;
}

hs_status hs_config_set(hs_config* config, const char* key, const char* value) {
  if (config == nullptr) return NullArg("config");
  if (key == nullptr || value == nullptr) return NullArg("key/value");
  return Check(config->config.Set(key, value));
}

hs_status hs_config_get(const hs_config* config, const char* key, char** out) {
  if (config == nullptr) return NullArg("config");
  if (key == nullptr || out == nullptr) return NullArg("key/out");
  absl::StatusOr<std::string> v = config->config.Get(key);
  if (!v.ok()) return Fail(v.status());
  *out = Dup(*v);
  return HS_OK;
}

hs_status hs_config_validate(const hs_config* config) {
  if (config == nullptr) return NullArg("config");
  return Check(config->config.Validate());
}

hs_status hs_config_serialize(const hs_config* config, char** out) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  *out = Dup(config->config.Serialize());
  return HS_OK;
}

hs_status hs_config_hash(const hs_config* config, char** out) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  *out = Dup(config->config.Hash());
  return HS_OK;
}

void hs_config_free(hs_config* config) { delete config; }

hs_status hs_workload_build(const hs_config* config, hs_workload** out) {
  if (config == nullptr) return NullArg("config");
  if (out == nullptr) return NullArg("out");
  absl::StatusOr<hysched::WorkloadSpec> w =
      hysched::BuildWorkload(config->config);
  if (!w.ok()) return Fail(w.status());
  *out = new hs_workload{*std::move(w)};
  return HS_OK;
}

hs_status hs_workload_read(const char* path, hs_workload** out) {
  if (path == nullptr) return NullArg("path");
  if (out == nullptr) return NullArg("out");
  absl::StatusOr<hysched::WorkloadSpec> w = hysched::ReadWorkload(path);
  if (!w.ok()) return Fail(w.status());
  *out = new hs_workload{*std::move(w)};
  return HS_OK;
}

hs_status hs_workload_write(const hs_workload* workload, const char* path) {
  if (workload == nullptr) return NullArg("workload");
  if (path == nullptr) return NullArg("path");
  return Check(hysched::WriteWorkload(workload->spec, path));
}

hs_status hs_workload_stats_json(const hs_workload* workload, char** out) {
  if (workload == nullptr) return NullArg("workload");
  if (out == nullptr) return NullArg("out");
  *out = Dup(hysched::StatsJson(hysched::ComputeStats(workload->spec)));
  return HS_OK;
}

size_t hs_workload_size(const hs_workload* workload) {
  return workload == nullptr ? 0 : workload->spec.entries.size();
}

hs_status hs_workload_demand_percentile(const hs_workload* workload, double p,
                                        int64_t* out_us) {
  if (workload == nullptr) return NullArg("workload");
  if (out_us == nullptr) return NullArg("out_us");
  std::vector<hysched::SimTime> d;
  d.reserve(workload->spec.entries.size());
  for (const hysched::WorkloadEntry& e : workload->spec.entries) {
    d.push_back(e.demand);
  }
  absl::StatusOr<hysched::SimTime> v = hysched::Percentile(d, p);
  if (!v.ok()) return Fail(v.status());
  *out_us = v->micros();
  return HS_OK;
}

void hs_workload_free(hs_workload* workload) { delete workload; }

hs_status hs_simulate(const hs_config* config, const hs_workload* workload,
                      hs_report** out) {
  if (config == nullptr) return NullArg("config");
  if (workload == nullptr) return NullArg("workload");
  if (out == nullptr) return NullArg("out");
  const hysched::ExperimentConfig& c = config->config;
  if (absl::Status s = c.Validate(); !s.ok()) return Fail(s);
  absl::StatusOr<hysched::CostModel> model =
      c.cost_table.empty() ? hysched::CostModel::Default()
                           : hysched::CostModel::Load(c.cost_table);
  if (!model.ok()) return Fail(model.status());
  absl::StatusOr<std::unique_ptr<hysched::Scheduler>> scheduler =
      hysched::MakeScheduler(c.policy, c.enclave_cores);
  if (!scheduler.ok()) return Fail(scheduler.status());
  hysched::SimOptions opts;
  opts.monitor_period = c.monitor_period;
  if (c.horizon.micros() > 0) opts.horizon = c.horizon;
  absl::StatusOr<hysched::SimulationResult> result =
      hysched::Simulate(workload->spec, **scheduler, c.enclave_cores, opts);
  if (!result.ok()) return Fail(result.status());
  absl::StatusOr<hysched::RunReport> report =
      hysched::Aggregate(*result, *model);
  if (!report.ok()) return Fail(report.status());
  report->policy = hysched::PolicyKindName(c.policy.kind);
  report->run_id = report->policy;
  report->config_hash = c.Hash();
  *out = new hs_report{*std::move(report), result->end_time.micros(),
                       static_cast<int64_t>(result->migrations.size())};
  return HS_OK;
}

hs_status hs_report_summary(const hs_report* report, hs_summary* out) {
  if (report == nullptr) return NullArg("report");
  if (out == nullptr) return NullArg("out");
  const hysched::Aggregates& a = report->report.aggregates;
  *out = hs_summary{ToC(a.execution),    ToC(a.response),
                    ToC(a.turnaround),   a.total_cost_usd,
                    a.completed,         report->report.censored,
                    report->end_time_us, report->migrations};
  return HS_OK;
}

hs_status hs_report_set_run_id(hs_report* report, const char* run_id) {
  if (report == nullptr) return NullArg("report");
  if (run_id == nullptr) return NullArg("run_id");
  report->report.run_id = run_id;
  return HS_OK;
}

hs_status hs_report_export(const hs_report* report, const char* dir) {
  if (report == nullptr) return NullArg("report");
  if (dir == nullptr) return NullArg("dir");
  return Check(hysched::ExportReport(report->report, dir));
}

void hs_report_free(hs_report* report) { delete report; }

hs_status hs_compare(const hs_report* const* reports, size_t n, char** out,
                     size_t* cheapest) {
  if (reports == nullptr) return NullArg("reports");
  if (out == nullptr) return NullArg("out");
  std::vector<hysched::RunReport> list;
  list.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (reports[i] == nullptr) return NullArg("reports[i]");
    list.push_back(reports[i]->report);
  }
  absl::StatusOr<hysched::Comparison> cmp = hysched::Compare(list);
  if (!cmp.ok()) return Fail(cmp.status());
  *out = Dup(cmp->ToCsv());
  if (cheapest != nullptr) *cheapest = cmp->cheapest;
  return HS_OK;
}

}  // extern "C"
