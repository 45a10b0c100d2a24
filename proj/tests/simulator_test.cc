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
#include <catch_amalgamated.hpp>

#include <map>
#include <utility>

#include "oracles.h"
#include "torsim/simulator.h"

using namespace torsim;

namespace {

SimConfig small(Policy policy, Pattern pattern, double gamma) {
  SimConfig cfg;
  cfg.dims = {4, 4, 4};
  cfg.policy = policy;
  cfg.pattern = pattern;
  cfg.gamma = gamma;
  cfg.message_packets = 16;
  cfg.warmup_ns = 20'000;
  cfg.measure_ns = 80'000;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST_CASE("gamma0 matches the bisection cut count") {
  SimConfig cfg;
  cfg.dims = {16, 16, 16};
  double expect = oracle::saturating_uniform_rate({16, 16, 16}, 20.0, 512);
  CHECK(gamma0_rate(cfg) == Catch::Approx(expect).epsilon(1e-12));
  CHECK(gamma0_rate(cfg) == Catch::Approx(2.441e6).epsilon(1e-3));
  cfg.dims = {8, 8, 8};
  CHECK(gamma0_rate(cfg) ==
        Catch::Approx(oracle::saturating_uniform_rate({8, 8, 8}, 20.0, 512)).epsilon(1e-12));
  CHECK(gamma0_rate(cfg) == Catch::Approx(2 * 2.441e6).epsilon(1e-3));
  SimConfig big = cfg;
  big.packet_bytes = 1024;
  CHECK(gamma0_rate(big) == Catch::Approx(gamma0_rate(cfg) / 2).epsilon(1e-12));
  cfg.dims = {16, 8, 8};
  CHECK(gamma0_rate(cfg) ==
        Catch::Approx(oracle::saturating_uniform_rate({16, 8, 8}, 20.0, 512)).epsilon(1e-12));
  cfg.dims = {5, 5, 5};
  CHECK_THROWS_AS(gamma0_rate(cfg), ConfigError);
}

TEST_CASE("link timing") {
  SimConfig cfg;
  LinkTiming t = link_timing(cfg);
  CHECK(t.ser_ext == 205);
  CHECK(t.ser_int == 64);
  CHECK(t.feed_interval >= t.ser_int);
  CHECK(empty_network_latency(cfg, 3) == 80 + 64 + 3 * (200 + 205) + 80 + 64);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.capacity = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.pattern = Pattern::kTranspose;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SimConfig{};
  cfg.dims = {4, 4, 4, 4};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.policy = Policy::kPor;
  CHECK_NOTHROW(cfg.validate());
  CHECK(SimConfig{}.effective_eta() == Rational(2));
  cfg.eta = Rational(3, 2);
  CHECK(cfg.effective_eta() == Rational(3, 2));
}

TEST_CASE("zero load produces nothing") {
  for (Policy p : {Policy::kAbr, Policy::kPor, Policy::kOfr}) {
    SimConfig cfg = small(p, Pattern::kUniform, 0.0);
    cfg.keep_records = true;
    RunResult r = run(cfg);
    CHECK(r.stats.generated == 0);
    CHECK(r.stats.consumed == 0);
    CHECK(r.records.empty());
    CHECK(r.measure.consumed == 0);
  }
}

TEST_CASE("isolated messages follow the pipeline timing") {
  SimConfig cfg;
  cfg.dims = {8, 8, 8};
  cfg.policy = Policy::kOfr;
  cfg.gamma = 6e-5;
  cfg.warmup_ns = 0;
  cfg.measure_ns = 10'000'000;
  cfg.keep_records = true;
  RunResult r = run(cfg);
  oracle::TorusGraph g({8, 8, 8});
  // First packet of every message, keyed by (source, creation time).
  std::map<std::pair<int, SimTime>, PacketRecord> first;
  for (const PacketRecord& rec : r.records) {
    auto key = std::make_pair(rec.src, rec.created_at);
    auto it = first.find(key);
    if (it == first.end() || rec.id < it->second.id) first[key] = rec;
  }
  REQUIRE(first.size() >= 10);
  for (const auto& [key, rec] : first) {
    int d = g.distance(rec.src, rec.dst);
    CHECK(rec.kind == IdnType::kNone);
    CHECK(rec.hops == d);
    CHECK(rec.lifetime() == 80 + 64 + d * (200 + 205) + 80 + 64);
  }
}

TEST_CASE("identical seeds give identical runs") {
  SimConfig cfg = small(Policy::kOfr, Pattern::kUniform, 0.6);
  cfg.keep_records = true;
  RunResult a = run(cfg);
  RunResult b = run(cfg);
  CHECK(a.stats.trace_hash == b.stats.trace_hash);
  CHECK(a.stats.events == b.stats.events);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    REQUIRE(a.records[i].id == b.records[i].id);
    REQUIRE(a.records[i].consumed_at == b.records[i].consumed_at);
    REQUIRE(a.records[i].idn == b.records[i].idn);
  }
  cfg.seed = 4;
  CHECK(run(cfg).stats.trace_hash != a.stats.trace_hash);
}

TEST_CASE("records and sink agree with the measurement totals") {
  SimConfig cfg = small(Policy::kPor, Pattern::kUniform, 0.5);
  cfg.keep_records = true;
  std::int64_t sunk = 0;
  RunResult r = run(cfg, [&](const PacketRecord& rec) {
    ++sunk;
    CHECK(rec.consumed_at >= cfg.warmup_ns);
    CHECK(rec.consumed_at < cfg.warmup_ns + cfg.measure_ns);
  });
  CHECK(sunk == r.measure.consumed);
  CHECK(static_cast<std::int64_t>(r.records.size()) == r.measure.consumed);
  CHECK(static_cast<int>(r.windows.size()) == cfg.subwindows);
  std::int64_t sum = 0;
  for (const auto& w : r.windows) sum += w.consumed;
  CHECK(sum == r.measure.consumed);
  CHECK(r.probes.size() == static_cast<std::size_t>(cfg.subwindows + 1));
}

TEST_CASE("audited stress runs over every policy and pattern") {
  for (Policy p : {Policy::kAbr, Policy::kPor, Policy::kOfr}) {
    for (Pattern pat : {Pattern::kUniform, Pattern::kButterfly, Pattern::kTranspose,
                        Pattern::kTranspose3d, Pattern::kBitReverse}) {
      DYNAMIC_SECTION(to_string(p) << " " << to_string(pat)) {
        SimConfig cfg = small(p, pat, 1.2);
        cfg.audit_every = 997;
        cfg.drain_ns = 5'000'000;
        RunResult r;
        REQUIRE_NOTHROW(r = run(cfg));
        CHECK(r.stats.audits > 0);
        CHECK(r.stats.conservation_failures == 0);
        CHECK(r.stats.watchdog_stalls == 0);
        CHECK(r.stats.hop_mismatches == 0);
        CHECK(r.stats.timing_violations == 0);
        CHECK(r.stats.max_phase_switches <= 1);
        CHECK(r.stats.drained);
        // Generators stop feeding at the end of the window; what they still
        // hold never enters the network.
        CHECK(r.stats.consumed + r.probes.back().backlog == r.stats.generated);
        if (p == Policy::kAbr) CHECK(r.stats.derouted_decisions == 0);
      }
    }
  }
}

TEST_CASE("ABR with two virtual channels per port") {
  SimConfig cfg = small(Policy::kAbr, Pattern::kUniform, 1.0);
  cfg.abr_two_vcs = true;
  cfg.audit_every = 997;
  cfg.drain_ns = 5'000'000;
  RunResult r = run(cfg);
  CHECK(r.stats.drained);
  CHECK(r.stats.consumed + r.probes.back().backlog == r.stats.generated);
  CHECK(r.stats.watchdog_stalls == 0);
}
