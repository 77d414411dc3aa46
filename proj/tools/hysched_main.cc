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

// Command-line driver: gen, sim and sweep over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hysched_c.h"

namespace {

enum ExitCode {
  kExitOk = 0,
  kExitConfig = 2,
  kExitCensored = 3,
  kExitIo = 4,
  kExitInternal = 5,
};

int ExitFor(hs_status s) {
  switch (s) {
    case HS_OK:
      return kExitOk;
    case HS_INVALID_ARGUMENT:
    case HS_FAILED_PRECONDITION:
      return kExitConfig;
    case HS_IO_ERROR:
      return kExitIo;
    default:
      return kExitInternal;
  }
}

struct ConfigDeleter {
  void operator()(hs_config* c) const { hs_config_free(c); }
};
struct WorkloadDeleter {
  void operator()(hs_workload* w) const { hs_workload_free(w); }
};
struct ReportDeleter {
  void operator()(hs_report* r) const { hs_report_free(r); }
};
using ConfigPtr = std::unique_ptr<hs_config, ConfigDeleter>;
using WorkloadPtr = std::unique_ptr<hs_workload, WorkloadDeleter>;
using ReportPtr = std::unique_ptr<hs_report, ReportDeleter>;

// Thrown to unwind with an exit code after printing the library error.
struct Failure {
  int code;
};

void Ok(hs_status s, const std::string& what) {
  if (s == HS_OK) return;
  std::cerr << "error: " << what << ": " << hs_last_error() << "\n";
  throw Failure{ExitFor(s)};
}

std::string TakeString(char* s) {
  std::string out = s == nullptr ? "" : s;
  hs_string_free(s);
  return out;
}

// Relative output paths land under $HYSCHED_OUTPUT_ROOT when it is set.
std::string OutputPath(const std::string& path) {
  const char* root = std::getenv("HYSCHED_OUTPUT_ROOT");
  if (root == nullptr || *root == '\0') return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(root) / p).string();
}

void WriteText(const std::string& path, const std::string& text) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    throw Failure{kExitIo};
  }
}

// Options shared by every subcommand that builds a config.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
};

void AddCommon(CLI::App* app, CommonOptions* o) {
  app->add_option("--config", o->config_path, "Experiment config file");
  app->add_option("--set", o->overrides,
                  "Override a config key, e.g. --set policy.slice=4ms");
}

ConfigPtr LoadConfig(const CommonOptions& o) {
  hs_config* raw = nullptr;
  if (o.config_path.empty()) {
    Ok(hs_config_new(&raw), "config");
  } else {
    Ok(hs_config_load(o.config_path.c_str(), &raw), "config");
  }
  ConfigPtr config(raw);
  for (const std::string& kv : o.overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      throw Failure{kExitConfig};
    }
    Ok(hs_config_set(config.get(), kv.substr(0, eq).c_str(),
                     kv.substr(eq + 1).c_str()),
       "--set");
  }
  return config;
}

void Set(hs_config* c, const char* key, const std::string& value) {
  Ok(hs_config_set(c, key, value.c_str()), key);
}

std::string Get(const hs_config* c, const char* key) {
  char* out = nullptr;
  Ok(hs_config_get(c, key, &out), key);
  return TakeString(out);
}

std::string Hash(const hs_config* c) {
  char* out = nullptr;
  Ok(hs_config_hash(c, &out), "hash");
  return TakeString(out);
}

// Finds the Azure duration and invocation tables inside a trace directory.
void LocateTrace(const std::string& dir, std::string* durations,
                 std::string* invocations) {
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".csv") continue;
    if (name.find("duration") != std::string::npos && durations->empty()) {
      *durations = entry.path().string();
    } else if (name.find("invocation") != std::string::npos &&
               invocations->empty()) {
      *invocations = entry.path().string();
    }
  }
  if (ec || durations->empty() || invocations->empty()) {
    std::cerr << "error: " << dir
              << " must contain *duration*.csv and *invocation*.csv\n";
    throw Failure{kExitIo};
  }
}

// ---------------------------------------------------------------------------

struct GenOptions {
  CommonOptions common;
  bool synthetic = false;
  std::optional<int64_t> n;
  std::optional<uint64_t> seed;
  std::vector<std::string> trace_dirs;
  std::optional<int64_t> scale;
  std::optional<std::string> minutes;
  std::string buckets;
  std::string out = "workload.csv";
};

int RunGen(const GenOptions& o) {
  ConfigPtr config = LoadConfig(o.common);
  hs_config* c = config.get();
  if (o.synthetic && !o.trace_dirs.empty()) {
    std::cerr << "error: --synthetic and --trace are exclusive\n";
    return kExitConfig;
  }
  if (o.synthetic) Set(c, "workload.source", "synthetic");
  if (!o.trace_dirs.empty()) {
    // The duration and invocation tables may live in one or two dirs.
    std::string durations, invocations;
    for (const std::string& dir : o.trace_dirs) {
      LocateTrace(dir, &durations, &invocations);
    }
    Set(c, "workload.source", "trace");
    Set(c, "workload.durations", durations);
    Set(c, "workload.invocations", invocations);
  }
  if (o.n) Set(c, "workload.n", std::to_string(*o.n));
  if (o.seed) Set(c, "workload.seed", std::to_string(*o.seed));
  if (o.scale) Set(c, "workload.scale", std::to_string(*o.scale));
  if (o.minutes) Set(c, "workload.minutes", *o.minutes);
  if (!o.buckets.empty()) Set(c, "workload.buckets", o.buckets);
  Ok(hs_config_validate(c), "config");

  hs_workload* raw = nullptr;
  Ok(hs_workload_build(c, &raw), "gen");
  WorkloadPtr workload(raw);
  if (hs_workload_size(workload.get()) == 0) {
    std::cerr << "warning: the workload is empty; every count rounds to zero "
                 "at this scale and minute range\n";
  }
  const std::string path = OutputPath(o.out);
  std::error_code ec;
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  Ok(hs_workload_write(workload.get(), path.c_str()), "write workload");
  char* stats = nullptr;
  Ok(hs_workload_stats_json(workload.get(), &stats), "stats");
  WriteText(path + ".stats.json", TakeString(stats));
  std::cout << "config " << Hash(c) << "\n"
            << "wrote " << hs_workload_size(workload.get()) << " entries to "
            << path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PolicyFlags {
  std::string policy;
  std::optional<int> fifo_cores;
  std::optional<int> cfs_cores;
  std::optional<double> limit_ms;
  std::string adapt_limit;  // "p95"
  std::optional<int> window;
  bool rightsize = false;
  std::optional<int> cores;
  std::string cost_table;
};

void AddPolicyFlags(CLI::App* app, PolicyFlags* f) {
  app->add_option("--policy", f->policy,
                  "fifo, fifo_preempt, cfs, rr, edf or hybrid");
  app->add_option("--fifo-cores", f->fifo_cores, "Hybrid FIFO group size");
  app->add_option("--cfs-cores", f->cfs_cores, "Hybrid CFS group size");
  app->add_option("--limit-ms", f->limit_ms,
                  "Preemption limit (FIFO_PREEMPT tau, hybrid initial limit)");
  app->add_option("--adapt-limit", f->adapt_limit,
                  "Adapt the hybrid limit to a percentile, e.g. p95");
  app->add_option("--window", f->window, "Adaptation window size");
  app->add_flag("--rightsize", f->rightsize, "Enable group rightsizing");
  app->add_option("--cores", f->cores, "Enclave size");
  app->add_option("--cost-table", f->cost_table, "Cost table CSV");
}

void ApplyPolicyFlags(const PolicyFlags& f, hs_config* c) {
  if (!f.policy.empty()) Set(c, "policy.kind", f.policy);
  if (f.cores) Set(c, "engine.enclave_cores", std::to_string(*f.cores));
  if (f.fifo_cores) Set(c, "hybrid.fifo_cores", std::to_string(*f.fifo_cores));
  if (f.cfs_cores) Set(c, "hybrid.cfs_cores", std::to_string(*f.cfs_cores));
  if (f.limit_ms) {
    Set(c, "policy.preempt_limit",
        std::to_string(static_cast<int64_t>(*f.limit_ms * 1000.0)) + "us");
  }
  if (!f.adapt_limit.empty()) {
    std::string p = f.adapt_limit;
    if (!p.empty() && (p[0] == 'p' || p[0] == 'P')) p = p.substr(1);
    Set(c, "adapt.enabled", "true");
    Set(c, "adapt.percentile", p);
  }
  if (f.window) Set(c, "adapt.window", std::to_string(*f.window));
  if (f.rightsize) Set(c, "rightsize.enabled", "true");
  if (!f.cost_table.empty()) Set(c, "cost.table", f.cost_table);
}

WorkloadPtr LoadWorkload(const std::string& path, const hs_config* c) {
  hs_workload* raw = nullptr;
  if (path.empty()) {
    Ok(hs_workload_build(c, &raw), "workload");
  } else {
    Ok(hs_workload_read(path.c_str(), &raw), "workload");
  }
  return WorkloadPtr(raw);
}

void PrintSummary(const hs_summary& s) {
  auto ms = [](int64_t us) { return static_cast<double>(us) / 1000.0; };
  std::printf("completed %lld  censored %lld  end %.3f s  migrations %lld\n",
              static_cast<long long>(s.completed),
              static_cast<long long>(s.censored), ms(s.end_time_us) / 1000.0,
              static_cast<long long>(s.migrations));
  std::printf("%-11s %12s %12s %12s %12s\n", "metric (ms)", "p50", "p90", "p99",
              "max");
  const std::pair<const char*, const hs_quantiles*> rows[] = {
      {"execution", &s.execution},
      {"response", &s.response},
      {"turnaround", &s.turnaround}};
  for (const auto& [name, q] : rows) {
    std::printf("%-11s %12.3f %12.3f %12.3f %12.3f\n", name, ms(q->p50_us),
                ms(q->p90_us), ms(q->p99_us), ms(q->max_us));
  }
  std::printf("total cost  %.6f USD\n", s.total_cost_usd);
}

struct SimOptions {
  CommonOptions common;
  PolicyFlags policy;
  std::string workload;
  std::string out;
};

int RunSim(const SimOptions& o) {
  ConfigPtr config = LoadConfig(o.common);
  hs_config* c = config.get();
  ApplyPolicyFlags(o.policy, c);
  if (!o.out.empty()) Set(c, "output.dir", o.out);
  Ok(hs_config_validate(c), "config");
  WorkloadPtr workload = LoadWorkload(o.workload, c);

  std::cout << "config " << Hash(c) << "\n";
  hs_report* raw = nullptr;
  Ok(hs_simulate(c, workload.get(), &raw), "sim");
  ReportPtr report(raw);
  const std::string dir = OutputPath(Get(c, "output.dir"));
  Ok(hs_report_export(report.get(), dir.c_str()), "export");
  char* text = nullptr;
  Ok(hs_config_serialize(c, &text), "config");
  WriteText((std::filesystem::path(dir) / "config.ini").string(),
            TakeString(text));

  hs_summary s;
  Ok(hs_report_summary(report.get(), &s), "summary");
  PrintSummary(s);
  std::cout << "wrote " << dir << "\n";
  return s.censored > 0 ? kExitCensored : kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
  CommonOptions common;
  PolicyFlags policy;
  std::string workload;
  std::vector<int> splits;          // FIFO group sizes
  std::vector<double> percentiles;  // adaptation percentiles
  std::string objective = "p99_exec";
  std::string out = "sweep";
};

int64_t Objective(const hs_summary& s, const std::string& name) {
  if (name == "p50_exec") return s.execution.p50_us;
  if (name == "p90_exec") return s.execution.p90_us;
  if (name == "p99_exec") return s.execution.p99_us;
  if (name == "p99_resp") return s.response.p99_us;
  if (name == "p99_turn") return s.turnaround.p99_us;
  return -1;
}

std::string FormatNumber(double x) {
  std::ostringstream ss;
  ss << x;
  return ss.str();
}

int RunSweep(const SweepOptions& o) {
  if (o.splits.empty() && o.percentiles.empty()) {
    std::cerr << "error: empty grid; give --split and/or --percentiles\n";
    return kExitConfig;
  }
  if (o.objective != "cost" && Objective(hs_summary{}, o.objective) < 0) {
    std::cerr << "error: unknown objective '" << o.objective << "'\n";
    return kExitConfig;
  }
  ConfigPtr base = LoadConfig(o.common);
  ApplyPolicyFlags(o.policy, base.get());
  if (o.policy.policy.empty()) Set(base.get(), "policy.kind", "hybrid");
  // Each grid point sets its own split and is validated below.
  if (o.splits.empty()) Ok(hs_config_validate(base.get()), "config");
  WorkloadPtr workload = LoadWorkload(o.workload, base.get());
  const int cores = std::stoi(Get(base.get(), "engine.enclave_cores"));

  // Grid: splits x percentiles, either axis possibly absent.
  struct Point {
    std::string label;
    ConfigPtr config;
  };
  std::vector<Point> grid;
  std::vector<std::optional<int>> split_axis(o.splits.begin(), o.splits.end());
  if (split_axis.empty()) split_axis.push_back(std::nullopt);
  std::vector<std::optional<double>> pct_axis(o.percentiles.begin(),
                                              o.percentiles.end());
  if (pct_axis.empty()) pct_axis.push_back(std::nullopt);
  for (const std::optional<int>& split : split_axis) {
    for (const std::optional<double>& pct : pct_axis) {
      hs_config* raw = nullptr;
      Ok(hs_config_clone(base.get(), &raw), "config");
      ConfigPtr c(raw);
      std::string label;
      if (split) {
        Set(c.get(), "hybrid.fifo_cores", std::to_string(*split));
        Set(c.get(), "hybrid.cfs_cores", std::to_string(cores - *split));
        label = std::to_string(*split) + "+" + std::to_string(cores - *split);
      }
      if (pct) {
        Set(c.get(), "adapt.enabled", "true");
        Set(c.get(), "adapt.percentile", FormatNumber(*pct));
        label += (label.empty() ? "p" : "_p") + FormatNumber(*pct);
      }
      Ok(hs_config_validate(c.get()), label);
      grid.push_back(Point{label, std::move(c)});
    }
  }

  const std::string root = OutputPath(o.out);
  std::vector<ReportPtr> reports;
  std::vector<hs_summary> summaries;
  for (Point& p : grid) {
    const std::string dir = (std::filesystem::path(root) / p.label).string();
    Set(p.config.get(), "output.dir", dir);
    hs_report* raw = nullptr;
    Ok(hs_simulate(p.config.get(), workload.get(), &raw), p.label);
    ReportPtr r(raw);
    Ok(hs_report_set_run_id(r.get(), p.label.c_str()), "run id");
    Ok(hs_report_export(r.get(), dir.c_str()), "export");
    hs_summary s;
    Ok(hs_report_summary(r.get(), &s), "summary");
    std::cout << p.label << "  config " << Hash(p.config.get()) << "\n";
    summaries.push_back(s);
    reports.push_back(std::move(r));
  }

  // Best point: smallest objective among runs where every task completed.
  std::optional<size_t> best;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (summaries[i].censored > 0) continue;
    auto value = [&](size_t k) {
      return o.objective == "cost"
                 ? summaries[k].total_cost_usd
                 : static_cast<double>(Objective(summaries[k], o.objective));
    };
    if (!best || value(i) < value(*best)) best = i;
  }

  std::string table;
  if (reports.size() >= 2) {
    std::vector<const hs_report*> view;
    for (const ReportPtr& r : reports) view.push_back(r.get());
    char* csv = nullptr;
    Ok(hs_compare(view.data(), view.size(), &csv, nullptr), "compare");
    table = TakeString(csv);
  } else {
    const hs_summary& s = summaries.front();
    table =
        "run_id,policy,total_cost_usd,p99_resp_us,p99_exec_us,"
        "p99_turn_us,cost_ratio\n" +
        grid.front().label + "," + Get(base.get(), "policy.kind") + "," +
        FormatNumber(s.total_cost_usd) + "," +
        std::to_string(s.response.p99_us) + "," +
        std::to_string(s.execution.p99_us) + "," +
        std::to_string(s.turnaround.p99_us) + ",1\n";
  }
  WriteText((std::filesystem::path(root) / "comparison.csv").string(), table);
  std::cout << table;
  if (best) {
    std::cout << "best by " << o.objective << ": " << grid[*best].label << "\n";
  } else {
    std::cout << "no grid point completed every task\n";
  }
  for (const hs_summary& s : summaries) {
    if (s.censored > 0) return kExitCensored;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator for FaaS CPU scheduling policies"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a workload file");
  AddCommon(gen_cmd, &gen.common);
  gen_cmd->add_flag("--synthetic", gen.synthetic, "Synthetic generator");
  gen_cmd->add_option("--n", gen.n, "Number of invocations (synthetic)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--trace", gen.trace_dirs,
                      "Directories holding the Azure trace CSVs");
  gen_cmd->add_option("--scale", gen.scale, "Downscale factor (trace)");
  gen_cmd->add_option("--minutes", gen.minutes,
                      "Minute range a..b of the trace day");
  gen_cmd->add_option("--buckets", gen.buckets, "Duration bucket table");
  gen_cmd->add_option("--out", gen.out, "Output workload file");

  SimOptions sim;
  CLI::App* sim_cmd = app.add_subcommand("sim", "Run one simulation");
  AddCommon(sim_cmd, &sim.common);
  AddPolicyFlags(sim_cmd, &sim.policy);
  sim_cmd->add_option("--workload", sim.workload,
                      "Workload file (default: build from config)");
  sim_cmd->add_option("--out", sim.out, "Output directory");

  SweepOptions sweep;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Simulate a grid of hybrid settings");
  AddCommon(sweep_cmd, &sweep.common);
  AddPolicyFlags(sweep_cmd, &sweep.policy);
  sweep_cmd->add_option("--workload", sweep.workload, "Workload file");
  sweep_cmd->add_option("--split", sweep.splits, "FIFO group sizes")
      ->delimiter(',');
  sweep_cmd
      ->add_option("--percentiles", sweep.percentiles, "Adaptation percentiles")
      ->delimiter(',');
  sweep_cmd->add_option("--objective", sweep.objective,
                        "p50_exec, p90_exec, p99_exec, p99_resp, p99_turn "
                        "or cost");
  sweep_cmd->add_option("--out", sweep.out, "Output root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen_cmd->parsed()) return RunGen(gen);
    if (sim_cmd->parsed()) return RunSim(sim);
    if (sweep_cmd->parsed()) return RunSweep(sweep);
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitConfig;
}
