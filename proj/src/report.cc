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

#include "hysched/report.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "json.hpp"

namespace hysched {
namespace {

using Json = nlohmann::ordered_json;

Quantiles QuantilesOf(std::vector<SimTime> v) {
  std::sort(v.begin(), v.end());
  auto at = [&](double p) { return v[NearestRankIndex(v.size(), p)]; };
  return Quantiles{at(50), at(90), at(99), v.back()};
}

// Shortest text that parses back to the same double.
std::string Exact(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

Json QuantilesJson(const Quantiles& q) {
  Json j;
  j["p50_us"] = q.p50.micros();
  j["p90_us"] = q.p90.micros();
  j["p99_us"] = q.p99.micros();
  j["max_us"] = q.max.micros();
  return j;
}

Quantiles QuantilesFromJson(const Json& j) {
  return Quantiles{Micros(j.at("p50_us").get<int64_t>()),
                   Micros(j.at("p90_us").get<int64_t>()),
                   Micros(j.at("p99_us").get<int64_t>()),
                   Micros(j.at("max_us").get<int64_t>())};
}

absl::StatusOr<GroupTag> ParseGroup(absl::string_view s) {
  if (s == "fifo") return GroupTag::kFifo;
  if (s == "cfs") return GroupTag::kCfs;
  if (s == "none") return GroupTag::kNone;
  return absl::InvalidArgumentError(absl::StrCat("unknown group '", s, "'"));
}

absl::StatusOr<std::string> Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

absl::Status Spit(const std::string& path, absl::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

// Splits CSV text into rows after checking the header line.
absl::StatusOr<std::vector<std::vector<std::string>>> CsvRows(
    absl::string_view text, absl::string_view header, size_t width,
    absl::string_view file) {
  std::vector<std::vector<std::string>> rows;
  int line_no = 0;
  bool seen_header = false;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripTrailingAsciiWhitespace(line);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) {
        return absl::InvalidArgumentError(
            absl::StrCat(file, ":", line_no, ": unexpected header"));
      }
      seen_header = true;
      continue;
    }
    std::vector<std::string> cells = absl::StrSplit(line, ',');
    if (cells.size() != width) {
      return absl::InvalidArgumentError(
          absl::StrCat(file, ":", line_no, ": expected ", width,
                       " fields, got ", cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (!seen_header) {
    return absl::InvalidArgumentError(absl::StrCat(file, ": missing header"));
  }
  return rows;
}

absl::Status CellError(absl::string_view file, size_t row,
                       absl::string_view column) {
  return absl::InvalidArgumentError(
      absl::StrCat(file, ": data row ", row + 1, ": bad ", column));
}

}  // namespace

std::string Fingerprint(absl::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return absl::StrFormat("%016x", h);
}

absl::StatusOr<Aggregates> ComputeAggregates(const std::vector<TaskRow>& rows) {
  if (rows.empty()) {
    return absl::FailedPreconditionError("no completed tasks to aggregate");
  }
  std::vector<SimTime> exec, resp, turn;
  exec.reserve(rows.size());
  resp.reserve(rows.size());
  turn.reserve(rows.size());
  Aggregates a;
  for (const TaskRow& r : rows) {
    exec.push_back(r.metrics.execution);
    resp.push_back(r.metrics.response);
    turn.push_back(r.metrics.turnaround);
    a.total_cost_usd += r.metrics.cost_usd;
  }
  a.execution = QuantilesOf(std::move(exec));
  a.response = QuantilesOf(std::move(resp));
  a.turnaround = QuantilesOf(std::move(turn));
  a.completed = static_cast<int64_t>(rows.size());
  return a;
}

absl::StatusOr<RunReport> Aggregate(const SimulationResult& result,
                                    const CostModel& model) {
  if (result.tasks.empty()) {
    return absl::FailedPreconditionError("the run has no tasks");
  }
  RunReport report;
  std::string workload_bytes;
  for (const Task& t : result.tasks) {
    absl::StrAppend(&workload_bytes, t.arrival.micros(), ",", t.demand.micros(),
                    ",", t.memory_mb, "\n");
    if (!t.done()) {
      ++report.censored;
      continue;
    }
    absl::StatusOr<MetricsRecord> m = TaskMetrics(t);
    if (!m.ok()) return m.status();
    absl::StatusOr<double> cost =
        InvocationCost(m->execution, t.memory_mb, model);
    if (!cost.ok()) return cost.status();
    m->cost_usd = *cost;
    report.tasks.push_back(TaskRow{*m, t.arrival, *t.first_run, *t.completion,
                                   t.demand, t.memory_mb, t.preemptions});
  }
  report.workload_hash = Fingerprint(workload_bytes);
  // A run censored before any completion still reports, with zero aggregates.
  if (!report.tasks.empty()) {
    absl::StatusOr<Aggregates> agg = ComputeAggregates(report.tasks);
    if (!agg.ok()) return agg.status();
    report.aggregates = *agg;
  }
  for (const Core& c : result.cores) {
    report.cores.push_back(CoreSummary{c.id, c.group, c.preemption_count,
                                       c.limit_expiries, c.busy});
  }
  report.utilization = result.utilization;
  return report;
}

absl::StatusOr<Comparison> Compare(const std::vector<RunReport>& reports) {
  if (reports.size() < 2) {
    return absl::InvalidArgumentError("compare needs at least two reports");
  }
  for (const RunReport& r : reports) {
    if (r.workload_hash != reports.front().workload_hash) {
      return absl::InvalidArgumentError(
          absl::StrCat("workload hash mismatch: ", reports.front().run_id,
                       " has ", reports.front().workload_hash, ", ", r.run_id,
                       " has ", r.workload_hash));
    }
  }
  Comparison cmp;
  for (size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].aggregates.total_cost_usd <
        reports[cmp.cheapest].aggregates.total_cost_usd) {
      cmp.cheapest = i;
    }
  }
  const double base = reports[cmp.cheapest].aggregates.total_cost_usd;
  for (const RunReport& r : reports) {
    const Aggregates& a = r.aggregates;
    ComparisonRow row{r.run_id,
                      r.policy,
                      a.total_cost_usd,
                      a.response.p99,
                      a.execution.p99,
                      a.turnaround.p99,
                      1.0};
    if (base > 0) row.cost_ratio = a.total_cost_usd / base;
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

std::string Comparison::ToCsv() const {
  std::string out =
      "run_id,policy,total_cost_usd,p99_resp_us,p99_exec_us,p99_turn_us,"
      "cost_ratio\n";
  for (const ComparisonRow& r : rows) {
    absl::StrAppend(&out, r.run_id, ",", r.policy, ",", Exact(r.total_cost_usd),
                    ",", r.p99_response.micros(), ",", r.p99_execution.micros(),
                    ",", r.p99_turnaround.micros(), ",", Exact(r.cost_ratio),
                    "\n");
  }
  return out;
}

std::string TasksCsv(const RunReport& report) {
  std::string out = absl::StrCat(kTasksCsvHeader, "\n");
  for (const TaskRow& r : report.tasks) {
    absl::StrAppend(
        &out, r.metrics.task_id, ",", r.arrival.micros(), ",",
        r.first_run.micros(), ",", r.completion.micros(), ",",
        r.demand.micros(), ",", r.memory_mb, ",", r.preemptions, ",",
        r.metrics.execution.micros(), ",", r.metrics.response.micros(), ",",
        r.metrics.turnaround.micros(), ",", Exact(r.metrics.cost_usd), "\n");
  }
  return out;
}

std::string UtilCsv(const RunReport& report) {
  std::string out = absl::StrCat(kUtilCsvHeader, "\n");
  for (const UtilizationSample& s : report.utilization) {
    for (size_t i = 0; i < s.busy_fraction.size(); ++i) {
      absl::StrAppend(&out, s.window_start.micros(), ",", i, ",",
                      Exact(s.busy_fraction[i]), ",", GroupTagName(s.group[i]),
                      "\n");
    }
  }
  return out;
}

std::string SummaryJson(const RunReport& report) {
  Json j;
  j["run_id"] = report.run_id;
  j["policy"] = report.policy;
  j["config_hash"] = report.config_hash;
  j["workload_hash"] = report.workload_hash;
  j["completed"] = report.aggregates.completed;
  j["censored"] = report.censored;
  j["total_cost_usd"] = report.aggregates.total_cost_usd;
  j["execution"] = QuantilesJson(report.aggregates.execution);
  j["response"] = QuantilesJson(report.aggregates.response);
  j["turnaround"] = QuantilesJson(report.aggregates.turnaround);
  j["util_window_us"] = report.utilization.empty()
                            ? int64_t{0}
                            : report.utilization.front().window_len.micros();
  Json cores = Json::array();
  for (const CoreSummary& c : report.cores) {
    Json cj;
    cj["core"] = c.core;
    cj["group"] = GroupTagName(c.group);
    cj["preemptions"] = c.preemptions;
    cj["limit_expiries"] = c.limit_expiries;
    cj["busy_us"] = c.busy.micros();
    cores.push_back(std::move(cj));
  }
  j["cores"] = std::move(cores);
  return j.dump(2) + "\n";
}

absl::Status ExportReport(const RunReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  const std::filesystem::path base(dir);
  if (absl::Status s = Spit((base / "tasks.csv").string(), TasksCsv(report));
      !s.ok()) {
    return s;
  }
  if (absl::Status s = Spit((base / "util.csv").string(), UtilCsv(report));
      !s.ok()) {
    return s;
  }
  return Spit((base / "summary.json").string(), SummaryJson(report));
}

absl::StatusOr<RunReport> ImportReport(const std::string& dir) {
  const std::filesystem::path base(dir);
  absl::StatusOr<std::string> summary_text =
      Slurp((base / "summary.json").string());
  if (!summary_text.ok()) return summary_text.status();
  absl::StatusOr<std::string> tasks_text = Slurp((base / "tasks.csv").string());
  if (!tasks_text.ok()) return tasks_text.status();
  absl::StatusOr<std::string> util_text = Slurp((base / "util.csv").string());
  if (!util_text.ok()) return util_text.status();

  RunReport report;
  Aggregates stored;
  SimTime window;
  try {
    const Json j = Json::parse(*summary_text);
    report.run_id = j.at("run_id").get<std::string>();
    report.policy = j.at("policy").get<std::string>();
    report.config_hash = j.at("config_hash").get<std::string>();
    report.workload_hash = j.at("workload_hash").get<std::string>();
    report.censored = j.at("censored").get<int64_t>();
    stored.completed = j.at("completed").get<int64_t>();
    stored.total_cost_usd = j.at("total_cost_usd").get<double>();
    stored.execution = QuantilesFromJson(j.at("execution"));
    stored.response = QuantilesFromJson(j.at("response"));
    stored.turnaround = QuantilesFromJson(j.at("turnaround"));
    window = Micros(j.at("util_window_us").get<int64_t>());
    for (const Json& cj : j.at("cores")) {
      absl::StatusOr<GroupTag> g =
          ParseGroup(cj.at("group").get<std::string>());
      if (!g.ok()) return g.status();
      report.cores.push_back(CoreSummary{
          cj.at("core").get<CoreId>(), *g, cj.at("preemptions").get<int64_t>(),
          cj.at("limit_expiries").get<int64_t>(),
          Micros(cj.at("busy_us").get<int64_t>())});
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("summary.json: ", e.what()));
  }

  absl::StatusOr<std::vector<std::vector<std::string>>> rows =
      CsvRows(*tasks_text, kTasksCsvHeader, 11, "tasks.csv");
  if (!rows.ok()) return rows.status();
  static constexpr const char* kCols[] = {
      "task_id",   "arrival_us",  "first_run_us", "completion_us", "demand_us",
      "memory_mb", "preemptions", "exec_us",      "resp_us",       "turn_us"};
  for (size_t i = 0; i < rows->size(); ++i) {
    const std::vector<std::string>& c = (*rows)[i];
    int64_t v[10];
    for (int k = 0; k < 10; ++k) {
      if (!absl::SimpleAtoi(c[static_cast<size_t>(k)], &v[k])) {
        return CellError("tasks.csv", i, kCols[k]);
      }
    }
    double cost = 0;
    if (!absl::SimpleAtod(c[10], &cost)) {
      return CellError("tasks.csv", i, "cost_usd");
    }
    TaskRow r;
    r.metrics =
        MetricsRecord{v[0], Micros(v[7]), Micros(v[8]), Micros(v[9]), cost};
    r.arrival = Micros(v[1]);
    r.first_run = Micros(v[2]);
    r.completion = Micros(v[3]);
    r.demand = Micros(v[4]);
    r.memory_mb = static_cast<int32_t>(v[5]);
    r.preemptions = v[6];
    report.tasks.push_back(r);
  }

  rows = CsvRows(*util_text, kUtilCsvHeader, 4, "util.csv");
  if (!rows.ok()) return rows.status();
  for (size_t i = 0; i < rows->size(); ++i) {
    const std::vector<std::string>& c = (*rows)[i];
    int64_t start = 0, core = 0;
    double frac = 0;
    if (!absl::SimpleAtoi(c[0], &start)) {
      return CellError("util.csv", i, "window_start_us");
    }
    if (!absl::SimpleAtoi(c[1], &core)) {
      return CellError("util.csv", i, "core_id");
    }
    if (!absl::SimpleAtod(c[2], &frac)) {
      return CellError("util.csv", i, "busy_fraction");
    }
    absl::StatusOr<GroupTag> g = ParseGroup(c[3]);
    if (!g.ok()) return CellError("util.csv", i, "group");
    if (report.utilization.empty() ||
        report.utilization.back().window_start != Micros(start)) {
      report.utilization.push_back(
          UtilizationSample{Micros(start), window, {}, {}});
    }
    UtilizationSample& s = report.utilization.back();
    if (core != static_cast<int64_t>(s.busy_fraction.size())) {
      return CellError("util.csv", i, "core_id");
    }
    s.busy_fraction.push_back(frac);
    s.group.push_back(*g);
  }

  if (report.tasks.empty()) {
    report.aggregates = stored;
    if (stored.completed != 0) {
      return absl::DataLossError("summary.json disagrees with tasks.csv");
    }
    return report;
  }
  absl::StatusOr<Aggregates> agg = ComputeAggregates(report.tasks);
  if (!agg.ok()) return agg.status();
  if (!(*agg == stored)) {
    return absl::DataLossError("summary.json disagrees with tasks.csv");
  }
  report.aggregates = *agg;
  return report;
}

}  // namespace hysched
