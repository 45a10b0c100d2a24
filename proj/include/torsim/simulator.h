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
#ifndef TORSIM_SIMULATOR_H_
#define TORSIM_SIMULATOR_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "torsim/idn.h"
#include "torsim/rational.h"
#include "torsim/router.h"
#include "torsim/topology.h"
#include "torsim/traffic.h"

namespace torsim {

// Fatal simulator condition (broken internal invariant, runaway event
// queue). The message carries a state dump.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  std::vector<int> dims{8, 8, 8};
  Policy policy = Policy::kOfr;
  Pattern pattern = Pattern::kUniform;
  double gamma = 0.5;  // offered load in gamma0 units

  int packet_bytes = 512;
  int capacity = 8;          // packets per VC
  int message_packets = 96;  // packets per message
  SimTime lat_int_ns = 80;
  SimTime lat_ext_ns = 200;
  double bw_int_gbps = 64.0;
  double bw_ext_gbps = 20.0;

  int delta = 2;
  std::optional<Rational> eta;  // unset: 2 for OFR, 1 for POR

  std::uint64_t seed = 1;
  SimTime warmup_ns = 500'000;
  SimTime measure_ns = 1'000'000;
  int subwindows = 4;

  double feed_rate = 2.4;  // generator -> router rate, gamma0 units
  double jitter = 0.10;    // relative spread of message inter-arrival times
  bool abr_two_vcs = false;

  // After the measurement window, stop feeding routers and keep running up
  // to this long for the network to empty. 0 disables the drain.
  SimTime drain_ns = 0;
  // Full-state audit (credits, bubbles, conservation) every this many
  // events; 0 disables it.
  std::int64_t audit_every = 0;
  bool keep_records = false;
  std::int64_t max_events_queued = 200'000'000;

  Rational effective_eta() const;
  // Throws ConfigError.
  void validate() const;
};

// Per-node packet injection rate (packets/s) at gamma = 1: the rate that
// saturates the bisection under uniform traffic, 8 * (B_e / S) / k_max.
double gamma0_rate(const SimConfig& cfg);

struct LinkTiming {
  SimTime ser_int = 0;  // S / B_int, rounded up
  SimTime ser_ext = 0;  // S / B_ext, rounded up
  SimTime feed_interval = 0;
  double message_interval = 0;  // mean ns between messages of one node
};
LinkTiming link_timing(const SimConfig& cfg);

// Lifetime of a packet crossing `hops` links through an idle network.
SimTime empty_network_latency(const SimConfig& cfg, int hops);

struct PacketRecord {
  std::uint64_t id = 0;
  int src = 0;  // node indices, row-major
  int dst = 0;
  int idn = -1;
  IdnType kind = IdnType::kNone;
  int hops = 0;
  int phase_switches = 0;
  SimTime created_at = 0;
  SimTime consumed_at = 0;

  SimTime lifetime() const { return consumed_at - created_at; }
};

struct ProbeSample {
  SimTime time = 0;
  std::int64_t generated = 0;
  std::int64_t consumed = 0;
  std::int64_t resident = 0;  // counted independently by scanning state
  std::int64_t backlog = 0;   // packets waiting in generators
  std::int64_t in_router = 0;
};

struct WindowStat {
  std::int64_t consumed = 0;
  double lifetime_sum = 0;
  double mean_lifetime() const {
    return consumed ? lifetime_sum / static_cast<double>(consumed) : 0.0;
  }
};

struct RunStats {
  std::int64_t events = 0;
  std::uint64_t trace_hash = 0;
  std::int64_t generated = 0;  // packets created by generators
  std::int64_t consumed = 0;
  std::int64_t self_messages = 0;
  std::int64_t watchdog_stalls = 0;
  std::int64_t hop_mismatches = 0;
  std::int64_t timing_violations = 0;
  int max_phase_switches = 0;
  std::int64_t conservation_failures = 0;
  std::int64_t audits = 0;
  std::int64_t derouted_decisions = 0;
  bool drained = false;
  SimTime end_time = 0;
};

// Aggregates over packets consumed inside the measurement window.
struct MeasureStats {
  std::int64_t consumed = 0;
  double lifetime_sum = 0;
  double hops_sum = 0;
  std::int64_t widn = 0;
  std::int64_t oidn = 0;
  std::vector<SimTime> lifetimes;
};

struct RunResult {
  SimConfig config;
  RunStats stats;
  MeasureStats measure;
  std::vector<WindowStat> windows;
  std::vector<ProbeSample> probes;  // at each sub-window boundary
  std::vector<PacketRecord> records;  // only with keep_records
};

using RecordSink = std::function<void(const PacketRecord&)>;

// Runs one simulation: warmup, then the measurement window split into
// sub-windows, then the optional drain. Deterministic in (config, seed).
RunResult run(const SimConfig& cfg, const RecordSink& sink = {});

}  // namespace torsim

#endif  // TORSIM_SIMULATOR_H_
