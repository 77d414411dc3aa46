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

#include "hysched/workload.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "hysched/metrics.h"
#include "json.hpp"

namespace hysched {
namespace {

constexpr absl::string_view kWorkloadHeader = "iat_us,demand_us,memory_mb";

// Uniform double in [0, 1) from the top 53 bits, so streams are identical
// across standard libraries.
double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint64_t UniformIndex(std::mt19937_64& rng, uint64_t bound) {
  return static_cast<uint64_t>(Uniform01(rng) * static_cast<double>(bound));
}

absl::Status ValidateMemory(const MemoryDistribution& dist) {
  if (dist.empty()) {
    return absl::InvalidArgumentError("memory distribution is empty");
  }
  double total = 0.0;
  for (const auto& [mb, w] : dist) {
    if (mb <= 0 || !(w >= 0.0)) {
      return absl::InvalidArgumentError(
          "memory distribution needs positive sizes and weights >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    return absl::InvalidArgumentError("memory distribution has zero weight");
  }
  return absl::OkStatus();
}

int32_t SampleMemory(const MemoryDistribution& dist, std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& [mb, w] : dist) total += w;
  double u = Uniform01(rng) * total;
  for (const auto& [mb, w] : dist) {
    if (u < w) return mb;
    u -= w;
  }
  return dist.back().first;
}

std::string Sanitize(absl::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (absl::ascii_isspace(static_cast<unsigned char>(ch))) ch = '_';
  }
  return out.empty() ? "unknown" : out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<absl::string_view>> rows;
  std::vector<int> line_numbers;
};

absl::StatusOr<CsvTable> ParseCsv(absl::string_view text,
                                  absl::string_view what) {
  CsvTable table;
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = absl::StripTrailingAsciiWhitespace(raw);
    if (line.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (table.header.empty()) {
      for (absl::string_view f : fields) {
        table.header.emplace_back(absl::StripAsciiWhitespace(f));
      }
      continue;
    }
    if (fields.size() != table.header.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " line ", line_no, ": expected ",
                       table.header.size(), " fields, got ", fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(what, " is empty"));
  }
  return table;
}

absl::StatusOr<size_t> Column(const CsvTable& t, absl::string_view name,
                              absl::string_view what) {
  for (size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  return absl::InvalidArgumentError(
      absl::StrCat(what, " has no '", name, "' column"));
}

}  // namespace

std::vector<SimTime> WorkloadSpec::Arrivals() const {
  std::vector<SimTime> out;
  out.reserve(entries.size());
  SimTime t;
  for (const WorkloadEntry& e : entries) {
    t += e.iat;
    out.push_back(t);
  }
  return out;
}

SimTime WorkloadSpec::TotalDemand() const {
  SimTime total;
  for (const WorkloadEntry& e : entries) total += e.demand;
  return total;
}

MemoryDistribution DefaultMemoryDistribution() {
  return {{128, 0.35}, {256, 0.30}, {512, 0.20}, {1024, 0.15}};
}

int64_t TraceRow::Total() const {
  int64_t sum = 0;
  for (int64_t c : counts) sum += c;
  return sum;
}

int64_t TraceTable::TotalInvocations() const {
  int64_t sum = 0;
  for (const TraceRow& r : rows) sum += r.Total();
  return sum;
}

absl::StatusOr<std::vector<Bucket>> ParseBuckets(absl::string_view csv) {
  absl::StatusOr<CsvTable> table = ParseCsv(csv, "bucket table");
  if (!table.ok()) return table.status();
  absl::StatusOr<size_t> label = Column(*table, "bucket_label", "bucket table");
  if (!label.ok()) return label.status();
  absl::StatusOr<size_t> dur = Column(*table, "duration_ms", "bucket table");
  if (!dur.ok()) return dur.status();
  std::vector<Bucket> out;
  for (size_t i = 0; i < table->rows.size(); ++i) {
    Bucket b;
    b.label = std::string(absl::StripAsciiWhitespace(table->rows[i][*label]));
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(table->rows[i][*dur]),
                          &b.duration_ms) ||
        !(b.duration_ms > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("bucket table line ", table->line_numbers[i],
                       ": duration_ms must be a positive number"));
    }
    out.push_back(std::move(b));
  }
  std::sort(out.begin(), out.end(), [](const Bucket& a, const Bucket& b) {
    return a.duration_ms < b.duration_ms;
  });
  return out;
}

absl::StatusOr<TraceTable> IngestTrace(absl::string_view durations_csv,
                                       absl::string_view invocations_csv,
                                       const std::vector<Bucket>& buckets,
                                       const IngestOptions& options) {
  constexpr absl::string_view kDur = "duration table";
  constexpr absl::string_view kInv = "invocation table";
  absl::StatusOr<CsvTable> dur = ParseCsv(durations_csv, kDur);
  if (!dur.ok()) return dur.status();
  absl::StatusOr<CsvTable> inv = ParseCsv(invocations_csv, kInv);
  if (!inv.ok()) return inv.status();

  std::vector<size_t> dur_key, inv_key;
  for (absl::string_view name : {"HashOwner", "HashApp", "HashFunction"}) {
    absl::StatusOr<size_t> a = Column(*dur, name, kDur);
    if (!a.ok()) return a.status();
    absl::StatusOr<size_t> b = Column(*inv, name, kInv);
    if (!b.ok()) return b.status();
    dur_key.push_back(*a);
    inv_key.push_back(*b);
  }
  absl::StatusOr<size_t> avg = Column(*dur, "Average", kDur);
  if (!avg.ok()) return avg.status();

  // Minute columns are headed 1..minutes.
  std::vector<std::pair<int, size_t>> minute_cols;
  for (size_t i = 0; i < inv->header.size(); ++i) {
    int minute = 0;
    if (absl::SimpleAtoi(inv->header[i], &minute) && minute >= 1 &&
        minute <= options.minutes) {
      minute_cols.emplace_back(minute - 1, i);
    }
  }
  if (minute_cols.empty()) {
    return absl::InvalidArgumentError("invocation table has no minute columns");
  }

  auto key_of = [](const std::vector<absl::string_view>& row,
                   const std::vector<size_t>& cols) {
    std::string key;
    for (size_t c : cols) absl::StrAppend(&key, row[c], "\x1f");
    return key;
  };

  absl::flat_hash_map<std::string, double> durations;
  for (size_t i = 0; i < dur->rows.size(); ++i) {
    double ms = 0.0;
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(dur->rows[i][*avg]),
                          &ms)) {
      return absl::InvalidArgumentError(absl::StrCat("duration table line ",
                                                     dur->line_numbers[i],
                                                     ": non-numeric Average"));
    }
    durations.try_emplace(key_of(dur->rows[i], dur_key), ms);
  }

  std::map<double, std::vector<int64_t>> by_duration;
  for (size_t i = 0; i < inv->rows.size(); ++i) {
    const auto& row = inv->rows[i];
    auto it = durations.find(key_of(row, inv_key));
    if (it == durations.end()) continue;
    const double ms = it->second;
    if (!(ms > 0.0) || ms > options.max_duration_ms) continue;
    std::vector<int64_t> counts(static_cast<size_t>(options.minutes), 0);
    bool garbage = false;
    for (const auto& [minute, col] : minute_cols) {
      int64_t c = 0;
      if (!absl::SimpleAtoi(absl::StripAsciiWhitespace(row[col]), &c)) {
        return absl::InvalidArgumentError(
            absl::StrCat("invocation table line ", inv->line_numbers[i],
                         ": non-numeric count in minute ", minute + 1));
      }
      if (c < 0 || c > options.max_count_per_minute) garbage = true;
      counts[static_cast<size_t>(minute)] = c;
    }
    if (garbage) continue;
    auto [slot, inserted] = by_duration.try_emplace(ms, std::move(counts));
    if (!inserted) {
      for (size_t m = 0; m < slot->second.size(); ++m) {
        slot->second[m] += counts[m];
      }
    }
  }
  if (by_duration.empty()) {
    return absl::InvalidArgumentError("trace is empty after cleaning");
  }

  TraceTable out;
  out.minutes = options.minutes;
  if (buckets.empty()) {
    for (auto& [ms, counts] : by_duration) {
      out.rows.push_back({ms, absl::StrCat(ms), std::move(counts)});
    }
    return out;
  }
  // Nearest bucket; ties go to the shorter one.
  std::map<size_t, TraceRow> merged;
  for (auto& [ms, counts] : by_duration) {
    size_t best = 0;
    for (size_t b = 1; b < buckets.size(); ++b) {
      if (std::abs(buckets[b].duration_ms - ms) <
          std::abs(buckets[best].duration_ms - ms)) {
        best = b;
      }
    }
    auto [slot, inserted] = merged.try_emplace(best);
    if (inserted) {
      slot->second = {buckets[best].duration_ms, buckets[best].label,
                      std::move(counts)};
    } else {
      for (size_t m = 0; m < counts.size(); ++m) {
        slot->second.counts[m] += counts[m];
      }
    }
  }
  for (auto& [idx, row] : merged) out.rows.push_back(std::move(row));
  return out;
}

absl::StatusOr<WorkloadSpec> DeriveIat(const TraceTable& trace,
                                       const DeriveOptions& options) {
  if (options.scale < 1) {
    return absl::InvalidArgumentError("scale must be >= 1");
  }
  if (options.first_minute < 0 || options.num_minutes < 1 ||
      options.first_minute + options.num_minutes > trace.minutes) {
    return absl::InvalidArgumentError(absl::StrCat(
        "minute range [", options.first_minute, ", ",
        options.first_minute + options.num_minutes, ") outside the trace"));
  }
  if (absl::Status s = ValidateMemory(options.memory); !s.ok()) return s;

  constexpr int64_t kMinuteUs = 60'000'000;
  // (arrival, row, k) sorts arrivals with a deterministic tie-break.
  std::vector<std::tuple<int64_t, size_t, int64_t>> arrivals;
  for (int m = 0; m < options.num_minutes; ++m) {
    const size_t minute = static_cast<size_t>(options.first_minute + m);
    for (size_t r = 0; r < trace.rows.size(); ++r) {
      const auto& counts = trace.rows[r].counts;
      if (minute >= counts.size()) continue;
      const int64_t count = counts[minute] / options.scale;
      for (int64_t k = 0; k < count; ++k) {
        arrivals.emplace_back(m * kMinuteUs + k * kMinuteUs / count, r, k);
      }
    }
  }
  std::sort(arrivals.begin(), arrivals.end());

  WorkloadSpec spec;
  spec.source = "trace";
  spec.scale = options.scale;
  spec.seed = options.seed;
  spec.entries.reserve(arrivals.size());
  std::mt19937_64 rng(options.seed);
  int64_t prev = 0;
  for (const auto& [at, row, k] : arrivals) {
    WorkloadEntry e;
    e.iat = Micros(at - prev);
    e.demand = Micros(std::max<int64_t>(
        1, std::llround(trace.rows[row].duration_ms * 1000.0)));
    e.memory_mb = SampleMemory(options.memory, rng);
    spec.entries.push_back(e);
    prev = at;
  }
  return spec;
}

absl::StatusOr<WorkloadSpec> Synthesize(const SynthParams& p) {
  if (p.n_tasks < 0) {
    return absl::InvalidArgumentError("n_tasks must be >= 0");
  }
  if (!(p.short_fraction >= 0.0 && p.short_fraction <= 1.0)) {
    return absl::InvalidArgumentError("short_fraction must be in [0, 1]");
  }
  const auto [short_lo, short_hi] = p.short_range;
  const auto [tail_lo, tail_hi] = p.tail_range;
  if (short_lo.micros() <= 0 || short_hi <= short_lo || short_hi > Seconds(1)) {
    return absl::InvalidArgumentError(
        "short_range must satisfy 0 < lo < hi <= 1 s");
  }
  if (tail_lo < Seconds(1) || tail_hi <= tail_lo) {
    return absl::InvalidArgumentError("tail_range must satisfy 1 s <= lo < hi");
  }
  if (!(p.tail_alpha > 0.0)) {
    return absl::InvalidArgumentError("tail_alpha must be > 0");
  }
  if (p.span.micros() <= 0 || !(p.burst_factor >= 1.0) ||
      !(p.burst_share >= 0.0 && p.burst_share < 1.0) ||
      p.mean_burst_len.micros() <= 0) {
    return absl::InvalidArgumentError(
        "need span > 0, burst_factor >= 1, burst_share in [0, 1), "
        "mean_burst_len > 0");
  }
  if (absl::Status s = ValidateMemory(p.memory); !s.ok()) return s;

  std::mt19937_64 rng(p.seed);
  const size_t n = static_cast<size_t>(p.n_tasks);

  // Demands: an exact short/tail split, then shuffled.
  const size_t n_short = static_cast<size_t>(
      std::llround(p.short_fraction * static_cast<double>(n)));
  std::vector<SimTime> demands(n);
  const double log_ratio = std::log(static_cast<double>(short_hi.micros()) /
                                    static_cast<double>(short_lo.micros()));
  const double lo = static_cast<double>(tail_lo.micros());
  const double hi = static_cast<double>(tail_hi.micros());
  const double trunc = 1.0 - std::pow(lo / hi, p.tail_alpha);
  for (size_t i = 0; i < n; ++i) {
    const double u = Uniform01(rng);
    int64_t us = 0;
    if (i < n_short) {
      us = static_cast<int64_t>(static_cast<double>(short_lo.micros()) *
                                std::exp(u * log_ratio));
      us = std::clamp<int64_t>(us, short_lo.micros(), short_hi.micros() - 1);
    } else {
      double x = lo * std::pow(1.0 - u * trunc, -1.0 / p.tail_alpha);
      us = std::clamp<int64_t>(static_cast<int64_t>(x), tail_lo.micros(),
                               tail_hi.micros());
    }
    demands[i] = Micros(us);
  }
  for (size_t i = n; i > 1; --i) {
    std::swap(demands[i - 1], demands[UniformIndex(rng, i)]);
  }

  // Arrivals: alternate baseline and spike episodes with exponential
  // lengths, then draw n points from the piecewise-constant intensity.
  struct Segment {
    double start, end, rate;
  };
  std::vector<Segment> segments;
  const double span = static_cast<double>(p.span.micros());
  const double burst_len = static_cast<double>(p.mean_burst_len.micros());
  const double off_len = p.burst_share > 0.0
                             ? burst_len * (1.0 - p.burst_share) / p.burst_share
                             : span;
  double t = 0.0;
  bool burst = false;
  while (t < span) {
    const double mean = burst ? burst_len : off_len;
    const double len = -mean * std::log(1.0 - Uniform01(rng));
    const double end = std::min(span, t + len);
    if (end > t) segments.push_back({t, end, burst ? p.burst_factor : 1.0});
    t = end;
    if (p.burst_share > 0.0) burst = !burst;
  }
  std::vector<double> cumulative;
  double mass = 0.0;
  for (const Segment& s : segments) {
    mass += (s.end - s.start) * s.rate;
    cumulative.push_back(mass);
  }
  std::vector<int64_t> at(n);
  for (size_t i = 0; i < n; ++i) {
    const double target = Uniform01(rng) * mass;
    size_t k = static_cast<size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), target) -
        cumulative.begin());
    k = std::min(k, segments.size() - 1);
    const double before = k == 0 ? 0.0 : cumulative[k - 1];
    const double x = segments[k].start + (target - before) / segments[k].rate;
    at[i] =
        std::clamp<int64_t>(static_cast<int64_t>(x), 0, p.span.micros() - 1);
  }
  std::sort(at.begin(), at.end());

  WorkloadSpec spec;
  spec.source = "synthetic";
  spec.seed = p.seed;
  spec.entries.reserve(n);
  int64_t prev = 0;
  for (size_t i = 0; i < n; ++i) {
    spec.entries.push_back(
        {Micros(at[i] - prev), demands[i], SampleMemory(p.memory, rng)});
    prev = at[i];
  }
  return spec;
}

std::string SerializeWorkload(const WorkloadSpec& spec) {
  std::string out =
      absl::StrCat("# source=", Sanitize(spec.source), " scale=", spec.scale,
                   " seed=", spec.seed, "\n", kWorkloadHeader, "\n");
  out.reserve(out.size() + spec.entries.size() * 24);
  for (const WorkloadEntry& e : spec.entries) {
    absl::StrAppend(&out, e.iat.micros(), ",", e.demand.micros(), ",",
                    e.memory_mb, "\n");
  }
  return out;
}

absl::StatusOr<WorkloadSpec> ParseWorkload(absl::string_view text) {
  WorkloadSpec spec;
  bool header = false;
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      for (absl::string_view kv :
           absl::StrSplit(line.substr(1), ' ', absl::SkipEmpty())) {
        std::pair<absl::string_view, absl::string_view> p =
            absl::StrSplit(kv, absl::MaxSplits('=', 1));
        if (p.first == "source") {
          spec.source = std::string(p.second);
        } else if (p.first == "scale") {
          (void)absl::SimpleAtoi(p.second, &spec.scale);
        } else if (p.first == "seed") {
          (void)absl::SimpleAtoi(p.second, &spec.seed);
        }
      }
      continue;
    }
    if (!header) {
      if (line != kWorkloadHeader) {
        return absl::InvalidArgumentError(
            absl::StrCat("workload line ", line_no, ": expected header '",
                         kWorkloadHeader, "'"));
      }
      header = true;
      continue;
    }
    std::vector<absl::string_view> f = absl::StrSplit(line, ',');
    int64_t iat = 0, demand = 0;
    int32_t mem = 0;
    if (f.size() != 3 || !absl::SimpleAtoi(f[0], &iat) ||
        !absl::SimpleAtoi(f[1], &demand) || !absl::SimpleAtoi(f[2], &mem)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "workload line ", line_no, ": malformed row '", line, "'"));
    }
    if (iat < 0 || demand <= 0 || mem <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("workload line ", line_no,
                       ": need iat >= 0, demand > 0 and memory > 0"));
    }
    spec.entries.push_back({Micros(iat), Micros(demand), mem});
  }
  if (!header) {
    return absl::InvalidArgumentError("workload file has no header");
  }
  return spec;
}

absl::Status WriteWorkload(const WorkloadSpec& spec, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << SerializeWorkload(spec);
  if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<WorkloadSpec> ReadWorkload(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseWorkload(ss.str());
}

WorkloadStats ComputeStats(const WorkloadSpec& spec) {
  WorkloadStats s;
  s.count = static_cast<int64_t>(spec.entries.size());
  if (spec.entries.empty()) return s;
  std::vector<SimTime> d;
  d.reserve(spec.entries.size());
  int64_t below = 0;
  for (const WorkloadEntry& e : spec.entries) {
    d.push_back(e.demand);
    if (e.demand < Seconds(1)) ++below;
    s.span += e.iat;
    s.total_demand += e.demand;
  }
  std::sort(d.begin(), d.end());
  auto at = [&](double p) { return d[NearestRankIndex(d.size(), p)]; };
  s.fraction_below_1s =
      static_cast<double>(below) / static_cast<double>(s.count);
  s.p50 = at(50);
  s.p80 = at(80);
  s.p90 = at(90);
  s.p99 = at(99);
  s.max = d.back();
  return s;
}

std::string StatsJson(const WorkloadStats& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["fraction_below_1s"] = s.fraction_below_1s;
  j["demand_p50_us"] = s.p50.micros();
  j["demand_p80_us"] = s.p80.micros();
  j["demand_p90_us"] = s.p90.micros();
  j["demand_p99_us"] = s.p99.micros();
  j["demand_max_us"] = s.max.micros();
  j["arrival_span_us"] = s.span.micros();
  j["total_demand_us"] = s.total_demand.micros();
  return j.dump(2) + "\n";
}

}  // namespace hysched
