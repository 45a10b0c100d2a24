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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "torsim/config.h"
#include "torsim/harness.h"

using namespace torsim;

namespace {

SaturationInput series(std::vector<double> means, std::vector<std::int64_t> backlog = {}) {
  SaturationInput in;
  in.window_means = std::move(means);
  in.backlog = std::move(backlog);
  in.consumed = 1000;
  in.backlog_threshold = 100;
  return in;
}

std::vector<GammaVerdict> sweep(std::initializer_list<Verdict> vs) {
  std::vector<GammaVerdict> out;
  double g = 0.1;
  for (Verdict v : vs) {
    out.push_back({g, v});
    g += 0.1;
  }
  return out;
}

SweepSpec tiny_spec() {
  SweepSpec spec;
  spec.base.dims = {4, 4, 4};
  spec.base.message_packets = 8;
  spec.base.measure_ns = 40'000;
  spec.warmup_cap_ns = 10'000;
  spec.policies = {Policy::kAbr, Policy::kOfr};
  spec.patterns = {Pattern::kUniform, Pattern::kBitReverse};
  spec.gammas = {0.2, 0.4};
  spec.seeds = {1, 2};
  spec.thresholds.min_packets = 10;
  return spec;
}

std::vector<std::string> argv(std::initializer_list<std::string> a) {
  std::vector<std::string> out{"torsim"};
  out.insert(out.end(), a.begin(), a.end());
  return out;
}

constexpr Verdict S = Verdict::kStable;
constexpr Verdict X = Verdict::kSaturated;
constexpr Verdict I = Verdict::kInconclusive;

}  // namespace

TEST_CASE("saturation detection") {
  SaturationThresholds th;
  CHECK(detect_saturation(series({100, 100, 100, 100}), th) == S);
  CHECK(detect_saturation(series({100, 200, 400, 800}), th) == X);
  // Rising but within the ratio.
  CHECK(detect_saturation(series({100, 110, 120, 140}), th) == S);
  // Large ratio but not monotone.
  CHECK(detect_saturation(series({100, 300, 250, 400}), th) == S);
  // Backlog growing steadily past the threshold.
  CHECK(detect_saturation(series({100, 100, 100, 100}, {0, 50, 90, 130, 170}), th) == X);
  CHECK(detect_saturation(series({100, 100, 100, 100}, {0, 20, 40, 60, 80}), th) == S);
  CHECK(detect_saturation(series({100, 100, 100, 100}, {0, 150, 140, 300, 400}), th) == S);
  SaturationInput few = series({100, 200, 400, 800});
  few.consumed = 99;
  CHECK(detect_saturation(few, th) == I);
  CHECK_THROWS_AS(detect_saturation(series({1, 2, 3}), th), ContractViolation);
}

TEST_CASE("gamma star") {
  auto all = sweep({S, S, S, S});
  GammaStar g = find_gamma_star(all);
  CHECK(g.value == Catch::Approx(0.4));
  CHECK(g.sweep_limited);
  CHECK_FALSE(g.non_monotone);

  auto knee = sweep({S, S, X, X});
  g = find_gamma_star(knee);
  CHECK(g.value == Catch::Approx(0.2));
  CHECK_FALSE(g.sweep_limited);
  CHECK_FALSE(g.non_monotone);

  auto bumpy = sweep({S, X, S, X});
  g = find_gamma_star(bumpy);
  CHECK(g.value == Catch::Approx(0.1));
  CHECK(g.non_monotone);

  auto none = sweep({X, X});
  g = find_gamma_star(none);
  CHECK(g.value == 0);

  auto unsure = sweep({S, I, X});
  g = find_gamma_star(unsure);
  CHECK(g.value == Catch::Approx(0.1));
  CHECK(g.inconclusive);

  std::vector<GammaVerdict> bad{{0.2, S}, {0.1, S}};
  CHECK_THROWS_AS(find_gamma_star(bad), ContractViolation);
}

TEST_CASE("majority vote") {
  CHECK(majority(std::vector<Verdict>{S, S, X}) == S);
  CHECK(majority(std::vector<Verdict>{X, S, X}) == X);
  CHECK(majority(std::vector<Verdict>{S, X}) == I);
  CHECK(majority(std::vector<Verdict>{I, I, S}) == S);
  CHECK(majority(std::vector<Verdict>{I}) == I);
}

TEST_CASE("aggregation from records") {
  std::vector<PacketRecord> none;
  RunRow row = aggregate(none);
  CHECK(row.consumed == 0);
  CHECK(row.frac_derouted == 0);

  std::vector<PacketRecord> recs(4);
  for (int i = 0; i < 4; ++i) {
    recs[i].created_at = 0;
    recs[i].consumed_at = 100 * (i + 1);
    recs[i].hops = i;
  }
  recs[1].kind = IdnType::kOidn;
  recs[2].kind = IdnType::kWidn;
  recs[3].kind = IdnType::kOidn;
  row = aggregate(recs);
  CHECK(row.consumed == 4);
  CHECK(row.mean_lifetime_ns == Catch::Approx(250));
  CHECK(row.median_lifetime_ns == Catch::Approx(200));
  CHECK(row.p99_lifetime_ns == Catch::Approx(400));
  CHECK(row.mean_hops == Catch::Approx(1.5));
  CHECK(row.frac_oidn == Catch::Approx(0.5));
  CHECK(row.frac_widn == Catch::Approx(0.25));
  CHECK(row.frac_derouted == Catch::Approx(0.75));
}

TEST_CASE("defaults") {
  auto g = default_gammas();
  REQUIRE(g.size() == 20);
  CHECK(g.front() == Catch::Approx(0.05));
  CHECK(g.back() == Catch::Approx(1.0));
  CHECK(shape_for_pattern(Pattern::kTranspose, {8, 8, 8}) == std::vector<int>{16, 8, 8});
  CHECK(shape_for_pattern(Pattern::kTranspose, {16, 16}) == std::vector<int>{16, 16});
  CHECK(shape_for_pattern(Pattern::kUniform, {8, 8, 8}) == std::vector<int>{8, 8, 8});
  SimConfig cfg;
  cfg.gamma = 0.5;
  LinkTiming t = link_timing(cfg);
  CHECK(default_warmup(cfg, 1'000'000'000) ==
        static_cast<SimTime>(std::llround(50 * t.message_interval)));
  CHECK(default_warmup(cfg, 1000) == 1000);
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("abc") == "abc");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("sweep output is deterministic across runs and job counts") {
  SweepSpec spec = tiny_spec();
  SweepResult a = run_sweep(spec);
  spec.jobs = 2;
  SweepResult b = run_sweep(spec);
  std::ostringstream sa;
  std::ostringstream sb;
  write_csv(sa, spec, a);
  write_csv(sb, spec, b);
  CHECK(sa.str() == sb.str());
  REQUIRE(a.rows.size() == 16);
  REQUIRE(a.summaries.size() == 4);
  CHECK(a.rows.front().policy == Policy::kAbr);
  CHECK(a.rows.front().seed == 1);
  CHECK(a.rows[1].seed == 2);
  for (const RunRow& r : a.rows) {
    if (r.policy == Policy::kAbr) CHECK(r.frac_derouted == 0);
  }
  // Header plus one line per run and per summary, after the comments.
  std::istringstream in(sa.str());
  std::string line;
  int data = 0;
  int header = 0;
  while (std::getline(in, line)) {
    if (line.rfind("row,", 0) == 0) ++header;
    if (line.rfind("run,", 0) == 0 || line.rfind("summary,", 0) == 0) ++data;
  }
  CHECK(header == 1);
  CHECK(data == 20);
}

TEST_CASE("sweep validation") {
  SweepSpec spec = tiny_spec();
  spec.gammas = {0.4, 0.2};
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);
  spec = tiny_spec();
  spec.seeds.clear();
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);
  spec = tiny_spec();
  spec.patterns = {Pattern::kTranspose3d};
  spec.base.dims = {4, 4, 8};
  CHECK_THROWS_AS(run_sweep(spec), ConfigError);
}

TEST_CASE("unit parsing") {
  CHECK(parse_duration_ns("80") == 80);
  CHECK(parse_duration_ns("80ns") == 80);
  CHECK(parse_duration_ns("2.5us") == 2500);
  CHECK(parse_duration_ns("10ms") == 10'000'000);
  CHECK(parse_duration_ns("1s") == 1'000'000'000);
  CHECK_THROWS_AS(parse_duration_ns("5 parsecs"), ConfigError);
  CHECK_THROWS_AS(parse_duration_ns("-3ns"), ConfigError);
  CHECK(parse_bandwidth_gbps("20") == 20);
  CHECK(parse_bandwidth_gbps("20Gb/s") == 20);
  CHECK(parse_bandwidth_gbps("64Gbps") == 64);
  CHECK(parse_bandwidth_gbps("500Mb/s") == Catch::Approx(0.5));
  CHECK_THROWS_AS(parse_bandwidth_gbps("fast"), ConfigError);
  CHECK(parse_gamma_list("0.5") == std::vector<double>{0.5});
  CHECK(parse_gamma_list("0.1,0.2") == std::vector<double>{0.1, 0.2});
  auto g = parse_gamma_list("0.05:1:0.05");
  CHECK(g.size() == 20);
  CHECK(g.back() == Catch::Approx(1.0));
  CHECK_THROWS_AS(parse_gamma_list("0.3,0.2"), ConfigError);
  CHECK(parse_seed_list("1:3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(parse_seed_list("7,9") == std::vector<std::uint64_t>{7, 9});
  CHECK(parse_dims("16x8x8") == std::vector<int>{16, 8, 8});
  CHECK(parse_dims("8,8") == std::vector<int>{8, 8});
  CHECK(parse_policy_list("all").size() == 3);
  CHECK(parse_pattern_list("uniform,bitrev") ==
        std::vector<Pattern>{Pattern::kUniform, Pattern::kBitReverse});
  CHECK_THROWS_AS(parse_policy_list("xyz"), ConfigError);
}

TEST_CASE("command line parsing") {
  std::ostringstream usage;
  CliOptions o = parse_cli(argv({"--k", "16", "--policy", "ofr,por", "--gamma",
                                 "0.1:0.3:0.1", "--seed", "1:3", "--lat-ext", "0.2us",
                                 "--bw-ext", "40Gb/s", "--eta", "1.5", "--quiet"}),
                           usage);
  CHECK(o.spec.base.dims == std::vector<int>{16, 16, 16});
  CHECK(o.spec.policies == std::vector<Policy>{Policy::kOfr, Policy::kPor});
  CHECK(o.spec.gammas.size() == 3);
  CHECK(o.spec.seeds.size() == 3);
  CHECK(o.spec.base.lat_ext_ns == 200);
  CHECK(o.spec.base.bw_ext_gbps == 40);
  REQUIRE(o.spec.base.eta.has_value());
  CHECK(*o.spec.base.eta == Rational(3, 2));
  CHECK(o.quiet);

  o = parse_cli(argv({"--warmup", "100us"}), usage);
  CHECK_FALSE(o.spec.auto_warmup);
  CHECK(o.spec.base.warmup_ns == 100'000);

  CHECK_THROWS_AS(parse_cli(argv({"--k", "8", "--dims", "8x8"}), usage), ConfigError);
  CHECK_THROWS_AS(parse_cli(argv({"--subwindows", "3"}), usage), ConfigError);
  CHECK_THROWS_AS(parse_cli(argv({"--bogus"}), usage), ConfigError);
  o = parse_cli(argv({"--help"}), usage);
  CHECK(o.help);
  CHECK(usage.str().find("--gamma") != std::string::npos);
}

TEST_CASE("config file with command-line override") {
  auto path = std::filesystem::temp_directory_path() / "torsim_cli_test.ini";
  {
    std::ofstream f(path);
    f << "k=4\npolicy=por\ngamma=0.1,0.2\nmeasure=20us\n";
  }
  std::ostringstream usage;
  CliOptions o = parse_cli(argv({"--config", path.string(), "--policy", "abr"}), usage);
  CHECK(o.spec.base.dims == std::vector<int>{4, 4, 4});
  CHECK(o.spec.policies == std::vector<Policy>{Policy::kAbr});
  CHECK(o.spec.gammas == std::vector<double>{0.1, 0.2});
  CHECK(o.spec.base.measure_ns == 20'000);
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  std::ostringstream out;
  std::ostringstream err;
  CHECK(cli_main(argv({"--pattern", "nope"}), out, err) == kExitConfig);
  CHECK(cli_main(argv({"--k", "5", "--pattern", "butterfly"}), out, err) == kExitConfig);
  CHECK(cli_main(argv({"--help"}), out, err) == kExitOk);
  out.str("");
  CHECK(cli_main(argv({"--k", "4", "--policy", "abr", "--gamma", "0.2", "--measure",
                       "40us", "--warmup", "10us", "--message-size", "8", "--min-packets",
                       "10", "--quiet"}),
                 out, err) == kExitOk);
  CHECK(out.str().find("run,abr,uniform,4x4x4,") != std::string::npos);
}
