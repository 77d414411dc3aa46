/*
 * Copyright 2026 The hysched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Stable C interface to the hysched simulator. All handles are opaque and
 * owned by the caller, who releases them with the matching *_free call.
 * Strings returned through `char**` are heap-allocated and released with
 * hs_string_free. On failure, hs_last_error() describes the most recent
 * error on the calling thread. */

#ifndef HYSCHED_C_H_
#define HYSCHED_C_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HS_API __declspec(dllexport)
#else
#define HS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  HS_OK = 0,
  HS_INVALID_ARGUMENT = 1, /* bad config, flag or input file contents */
  HS_IO_ERROR = 2,         /* missing or unwritable file */
  HS_FAILED_PRECONDITION = 3,
  HS_INTERNAL = 4,
} hs_status;

typedef struct hs_config hs_config;
typedef struct hs_workload hs_workload;
typedef struct hs_report hs_report;

typedef struct {
  int64_t p50_us;
  int64_t p90_us;
  int64_t p99_us;
  int64_t max_us;
} hs_quantiles;

typedef struct {
  hs_quantiles execution;
  hs_quantiles response;
  hs_quantiles turnaround;
  double total_cost_usd;
  int64_t completed;
  int64_t censored;
  int64_t end_time_us;
  int64_t migrations;
} hs_summary;

HS_API const char* hs_last_error(void);
HS_API const char* hs_version(void);
HS_API void hs_string_free(char* s);

/* Configuration. */
HS_API hs_status hs_config_new(hs_config** out);
HS_API hs_status hs_config_load(const char* path, hs_config** out);
HS_API hs_status hs_config_clone(const hs_config* config, hs_config** out);
/* key is `section.key`, e.g. "policy.kind" or "hybrid.fifo_cores". */
HS_API hs_status hs_config_set(hs_config* config, const char* key,
                               const char* value);
HS_API hs_status hs_config_get(const hs_config* config, const char* key,
                               char** out);
HS_API hs_status hs_config_validate(const hs_config* config);
HS_API hs_status hs_config_serialize(const hs_config* config, char** out);
HS_API hs_status hs_config_hash(const hs_config* config, char** out);
HS_API void hs_config_free(hs_config* config);

/* Workloads. */
HS_API hs_status hs_workload_build(const hs_config* config, hs_workload** out);
HS_API hs_status hs_workload_read(const char* path, hs_workload** out);
HS_API hs_status hs_workload_write(const hs_workload* workload,
                                   const char* path);
HS_API hs_status hs_workload_stats_json(const hs_workload* workload,
                                        char** out);
HS_API size_t hs_workload_size(const hs_workload* workload);
/* Nearest-rank percentile of the demands, in microseconds. */
HS_API hs_status hs_workload_demand_percentile(const hs_workload* workload,
                                               double p, int64_t* out_us);
HS_API void hs_workload_free(hs_workload* workload);

/* Simulation and reports. */
HS_API hs_status hs_simulate(const hs_config* config,
                             const hs_workload* workload, hs_report** out);
HS_API hs_status hs_report_summary(const hs_report* report, hs_summary* out);
HS_API hs_status hs_report_set_run_id(hs_report* report, const char* run_id);
/* Writes tasks.csv, util.csv and summary.json into dir. */
HS_API hs_status hs_report_export(const hs_report* report, const char* dir);
HS_API void hs_report_free(hs_report* report);

/* Comparison table (CSV) over reports of the same workload. Writes the
 * index of the cheapest report to *cheapest when non-null. */
HS_API hs_status hs_compare(const hs_report* const* reports, size_t n,
                            char** out, size_t* cheapest);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HYSCHED_C_H_ */
