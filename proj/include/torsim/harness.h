/*
 * Copyright 2026 The torsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef TORSIM_HARNESS_H_
#define TORSIM_HARNESS_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "torsim/simulator.h"

namespace torsim {

enum class Verdict : std::uint8_t { kStable, kSaturated, kInconclusive };
std::string to_string(Verdict v);

struct SaturationThresholds {
  // Sub-window mean lifetimes strictly increasing with last/first above this.
  double lifetime_ratio = 1.5;
  // Generator backlog strictly increasing across the probes and growing by
  // more than this many messages per node over the window.
  double backlog_growth_messages = 0.25;
  // Fewer consumed packets than this gives an inconclusive verdict.
  std::int64_t min_packets = 100;
};

struct SaturationInput {
  std::vector<double> window_means;     // mean lifetime per sub-window
  std::vector<std::int64_t> backlog;    // generator backlog at each probe
  std::int64_t consumed = 0;
  double backlog_threshold = 0;  // packets, absolute
};

// Needs at least 4 sub-windows.
Verdict detect_saturation(const SaturationInput& in,
                          const SaturationThresholds& th);

SaturationInput saturation_input(const RunResult& r,
                                 const SaturationThresholds& th);

struct GammaVerdict {
  double gamma = 0;
  Verdict verdict = Verdict::kStable;
};

struct GammaStar {
  double value = 0;  // 0 when even the smallest load saturates
  bool sweep_limited = false;  // every swept load was stable
  bool non_monotone = false;   // a stable load above a saturated one
  bool inconclusive = false;
};

// Largest swept load whose verdict and all smaller loads' verdicts are
// stable. Input must be sorted by increasing gamma. Inconclusive counts as
// not stable.
GammaStar find_gamma_star(std::span<const GammaVerdict> sweep);

// One simulation's row of the results table.
struct RunRow {
  Policy policy = Policy::kAbr;
  Pattern pattern = Pattern::kUniform;
  std::string dims;
  double gamma = 0;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::kStable;
  std::int64_t generated = 0;
  std::int64_t consumed = 0;
  double mean_lifetime_ns = 0;
  double median_lifetime_ns = 0;
  double p99_lifetime_ns = 0;
  double mean_hops = 0;
  double frac_oidn = 0;
  double frac_widn = 0;
  double frac_derouted = 0;
  std::int64_t backlog_growth = 0;
  std::int64_t watchdog_stalls = 0;
  std::int64_t hop_mismatches = 0;
  bool complete = true;
};

RunRow aggregate(const RunResult& r, const SaturationThresholds& th);
// Same metrics from raw per-packet records (e.g. a dumped packet stream).
RunRow aggregate(std::span<const PacketRecord> records);

struct SummaryRow {
  Policy policy = Policy::kAbr;
  Pattern pattern = Pattern::kUniform;
  std::string dims;
  GammaStar gamma_star;
  // Deroute fractions averaged over runs with gamma <= gamma*.
  double frac_oidn = 0;
  double frac_widn = 0;
  double frac_derouted = 0;
  bool complete = true;
};

struct SweepSpec {
  SimConfig base;
  std::vector<Policy> policies{Policy::kOfr};
  std::vector<Pattern> patterns{Pattern::kUniform};
  std::vector<double> gammas;  // strictly increasing
  std::vector<std::uint64_t> seeds{1};
  SaturationThresholds thresholds;
  // Use the default warmup discipline instead of base.warmup_ns.
  bool auto_warmup = true;
  SimTime warmup_cap_ns = 1'000'000;
  // Stop a (policy, pattern) sweep after this many consecutive saturated
  // loads; 0 runs every load.
  int stop_after_saturated = 0;
  // Skip the remaining seeds of a load once the majority is decided.
  bool early_majority = false;
  unsigned jobs = 1;
};

// Default loads 0.05, 0.10, ..., 1.00.
std::vector<double> default_gammas();

// Time for one node to generate 50 messages at cfg.gamma, capped.
SimTime default_warmup(const SimConfig& cfg, SimTime cap);

// Shape actually simulated for a pattern: transposition on a torus with a
// non-square node count doubles the first dimension (8x8x8 -> 16x8x8).
std::vector<int> shape_for_pattern(Pattern p, const std::vector<int>& dims);

struct SweepResult {
  std::vector<RunRow> rows;  // sorted by (policy, pattern, gamma, seed)
  std::vector<SummaryRow> summaries;
  std::vector<std::string> warnings;
  bool complete = true;
};

using ProgressFn = std::function<void(const RunRow&)>;
// Called for every consumed packet with the configuration of its run.
using PacketDumpFn = std::function<void(const SimConfig&, const PacketRecord&)>;

SweepResult run_sweep(const SweepSpec& spec, const ProgressFn& progress = {},
                      const PacketDumpFn& packets = {});

// Majority verdict over seeds; ties and all-inconclusive sets are
// inconclusive.
Verdict majority(std::span<const Verdict> votes);

// RFC 4180 field quoting.
std::string csv_field(const std::string& s);

// '#'-prefixed parameter lines, then one header and one row per run and per
// (policy, pattern) summary.
void write_csv(std::ostream& os, const SweepSpec& spec, const SweepResult& res);

}  // namespace torsim

#endif  // TORSIM_HARNESS_H_
