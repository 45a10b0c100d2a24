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
#include "torsim/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>
#include <tuple>

namespace torsim {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kStable: return "stable";
    case Verdict::kSaturated: return "saturated";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

Verdict detect_saturation(const SaturationInput& in,
                          const SaturationThresholds& th) {
  TORSIM_EXPECTS(in.window_means.size() >= 4,
                 "saturation detection needs at least 4 sub-windows");
  if (in.consumed < th.min_packets) return Verdict::kInconclusive;

  const auto& w = in.window_means;
  bool rising = std::adjacent_find(w.begin(), w.end(),
                                   [](double a, double b) { return b <= a; }) == w.end();
  if (rising && w.front() > 0 && w.back() / w.front() > th.lifetime_ratio) {
    return Verdict::kSaturated;
  }
  const auto& b = in.backlog;
  if (b.size() >= 2) {
    bool growing = std::adjacent_find(b.begin(), b.end(), [](std::int64_t x, std::int64_t y) {
                     return y <= x;
                   }) == b.end();
    if (growing && static_cast<double>(b.back() - b.front()) > in.backlog_threshold) {
      return Verdict::kSaturated;
    }
  }
  return Verdict::kStable;
}

SaturationInput saturation_input(const RunResult& r,
                                 const SaturationThresholds& th) {
  SaturationInput in;
  for (const WindowStat& w : r.windows) in.window_means.push_back(w.mean_lifetime());
  for (const ProbeSample& p : r.probes) in.backlog.push_back(p.backlog);
  in.consumed = r.measure.consumed;
  TorusShape shape(r.config.dims);
  in.backlog_threshold = th.backlog_growth_messages * r.config.message_packets *
                         shape.num_nodes();
  return in;
}

GammaStar find_gamma_star(std::span<const GammaVerdict> sweep) {
  GammaStar out;
  std::size_t i = 0;
  for (; i < sweep.size(); ++i) {
    if (i > 0) {
      TORSIM_EXPECTS(sweep[i].gamma > sweep[i - 1].gamma,
                     "sweep loads must be strictly increasing");
    }
    if (sweep[i].verdict != Verdict::kStable) break;
    out.value = sweep[i].gamma;
  }
  if (i == sweep.size()) {
    out.sweep_limited = !sweep.empty();
    return out;
  }
  out.inconclusive = sweep[i].verdict == Verdict::kInconclusive;
  for (std::size_t j = i + 1; j < sweep.size(); ++j) {
    if (sweep[j].verdict == Verdict::kStable) out.non_monotone = true;
    if (sweep[j].verdict == Verdict::kInconclusive) out.inconclusive = true;
  }
  return out;
}

Verdict majority(std::span<const Verdict> votes) {
  auto stable = std::count(votes.begin(), votes.end(), Verdict::kStable);
  auto saturated = std::count(votes.begin(), votes.end(), Verdict::kSaturated);
  if (stable > saturated) return Verdict::kStable;
  if (saturated > stable) return Verdict::kSaturated;
  return Verdict::kInconclusive;
}

namespace {

double percentile(std::vector<SimTime> v, double p) {
  if (v.empty()) return 0;
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
  std::size_t idx = rank == 0 ? 0 : rank - 1;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
  return static_cast<double>(v[idx]);
}

void fill_fractions(RunRow& row, std::int64_t consumed, std::int64_t oidn,
                    std::int64_t widn) {
  if (consumed == 0) return;
  auto n = static_cast<double>(consumed);
  row.frac_oidn = static_cast<double>(oidn) / n;
  row.frac_widn = static_cast<double>(widn) / n;
  row.frac_derouted = static_cast<double>(oidn + widn) / n;
}

}  // namespace

RunRow aggregate(const RunResult& r, const SaturationThresholds& th) {
  RunRow row;
  row.policy = r.config.policy;
  row.pattern = r.config.pattern;
  row.dims = TorusShape(r.config.dims).to_string();
  row.gamma = r.config.gamma;
  row.seed = r.config.seed;
  row.generated = r.stats.generated;
  const MeasureStats& m = r.measure;
  row.consumed = m.consumed;
  if (m.consumed > 0) {
    auto n = static_cast<double>(m.consumed);
    row.mean_lifetime_ns = m.lifetime_sum / n;
    row.mean_hops = m.hops_sum / n;
    row.median_lifetime_ns = percentile(m.lifetimes, 0.5);
    row.p99_lifetime_ns = percentile(m.lifetimes, 0.99);
  }
  fill_fractions(row, m.consumed, m.oidn, m.widn);
  if (r.probes.size() >= 2) {
    row.backlog_growth = r.probes.back().backlog - r.probes.front().backlog;
  }
  row.watchdog_stalls = r.stats.watchdog_stalls;
  row.hop_mismatches = r.stats.hop_mismatches;
  if (r.config.gamma == 0) {
    row.verdict = Verdict::kStable;
  } else {
    row.verdict = detect_saturation(saturation_input(r, th), th);
  }
  return row;
}

RunRow aggregate(std::span<const PacketRecord> records) {
  RunRow row;
  row.consumed = static_cast<std::int64_t>(records.size());
  std::int64_t oidn = 0;
  std::int64_t widn = 0;
  double life = 0;
  double hops = 0;
  std::vector<SimTime> lifetimes;
  lifetimes.reserve(records.size());
  for (const PacketRecord& rec : records) {
    life += static_cast<double>(rec.lifetime());
    hops += rec.hops;
    lifetimes.push_back(rec.lifetime());
    if (rec.kind == IdnType::kOidn) ++oidn;
    if (rec.kind == IdnType::kWidn) ++widn;
  }
  if (!records.empty()) {
    auto n = static_cast<double>(records.size());
    row.mean_lifetime_ns = life / n;
    row.mean_hops = hops / n;
    row.median_lifetime_ns = percentile(lifetimes, 0.5);
    row.p99_lifetime_ns = percentile(lifetimes, 0.99);
  }
  fill_fractions(row, row.consumed, oidn, widn);
  return row;
}

std::vector<double> default_gammas() {
  std::vector<double> g;
  for (int i = 1; i <= 20; ++i) g.push_back(i * 0.05);
  return g;
}

SimTime default_warmup(const SimConfig& cfg, SimTime cap) {
  if (cfg.gamma <= 0) return 0;
  double t = 50.0 * link_timing(cfg).message_interval;
  return std::min<SimTime>(cap, static_cast<SimTime>(std::llround(t)));
}

std::vector<int> shape_for_pattern(Pattern p, const std::vector<int>& dims) {
  if (p != Pattern::kTranspose || dims.empty()) return dims;
  long long nodes = 1;
  for (int k : dims) nodes *= k;
  auto is_square = [](long long v) {
    auto r = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(v))));
    return r * r == v;
  };
  if (is_square(nodes) || !is_square(2 * nodes)) return dims;
  std::vector<int> out = dims;
  out[0] *= 2;
  return out;
}

namespace {

struct SweepTask {
  Policy policy;
  Pattern pattern;
};

struct TaskOutput {
  std::vector<RunRow> rows;
  SummaryRow summary;
  std::vector<std::string> warnings;
};

TaskOutput run_task(const SweepSpec& spec, const SweepTask& task,
                    const ProgressFn& progress, const PacketDumpFn& packets,
                    std::mutex& callback_mu) {
  TaskOutput out;
  SimConfig cfg = spec.base;
  cfg.policy = task.policy;
  cfg.pattern = task.pattern;
  cfg.dims = shape_for_pattern(task.pattern, spec.base.dims);
  if (cfg.dims != spec.base.dims) {
    out.warnings.push_back(to_string(task.pattern) + " runs on " +
                           TorusShape(cfg.dims).to_string() + " instead of " +
                           TorusShape(spec.base.dims).to_string());
  }
  std::string dims = TorusShape(cfg.dims).to_string();


  std::vector<GammaVerdict> verdicts;
  int consecutive_saturated = 0;
  for (double gamma : spec.gammas) {
    std::vector<Verdict> votes;
    for (std::uint64_t seed : spec.seeds) {
      SimConfig c = cfg;
      c.gamma = gamma;
      c.seed = seed;
      if (spec.auto_warmup) c.warmup_ns = default_warmup(c, spec.warmup_cap_ns);
      RecordSink sink;
      if (packets) {
        sink = [&](const PacketRecord& rec) {
          std::lock_guard<std::mutex> lock(callback_mu);
          packets(c, rec);
        };
      }
      RunRow row;
      try {
        RunResult r = run(c, sink);
        row = aggregate(r, spec.thresholds);
        if (row.verdict == Verdict::kInconclusive) {
          c.measure_ns *= 2;
          r = run(c, sink);
          row = aggregate(r, spec.thresholds);
          row.complete = row.verdict != Verdict::kInconclusive;
        }
      } catch (const SimulationError& e) {
        row.policy = c.policy;
        row.pattern = c.pattern;
        row.gamma = gamma;
        row.seed = seed;
        row.verdict = Verdict::kInconclusive;
        row.complete = false;
        out.warnings.push_back(e.what());
      }
      row.dims = dims;
      if (progress) {
        std::lock_guard<std::mutex> lock(callback_mu);
        progress(row);
      }
      votes.push_back(row.verdict);
      out.rows.push_back(row);
      if (spec.early_majority) {
        auto half = static_cast<long>(spec.seeds.size() / 2);
        if (std::count(votes.begin(), votes.end(), Verdict::kStable) > half ||
            std::count(votes.begin(), votes.end(), Verdict::kSaturated) > half) {
          break;
        }
      }
    }
    Verdict v = majority(votes);
    verdicts.push_back({gamma, v});
    consecutive_saturated = v == Verdict::kStable ? 0 : consecutive_saturated + 1;
    if (spec.stop_after_saturated > 0 &&
        consecutive_saturated >= spec.stop_after_saturated) {
      break;
    }
  }

  SummaryRow& s = out.summary;
  s.policy = task.policy;
  s.pattern = task.pattern;
  s.dims = dims;
  s.gamma_star = find_gamma_star(verdicts);
  if (s.gamma_star.non_monotone) {
    out.warnings.push_back(to_string(task.policy) + "/" + to_string(task.pattern) +
                           ": stable load above a saturated one; gamma* is the "
                           "last load below the first saturated point");
  }
  double o = 0, w = 0, d = 0;
  int n = 0;
  for (const RunRow& r : out.rows) {
    s.complete &= r.complete;
    if (r.gamma <= s.gamma_star.value + 1e-9 && r.verdict == Verdict::kStable) {
      o += r.frac_oidn;
      w += r.frac_widn;
      d += r.frac_derouted;
      ++n;
    }
  }
  if (n > 0) {
    s.frac_oidn = o / n;
    s.frac_widn = w / n;
    s.frac_derouted = d / n;
  }
  return out;
}

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const ProgressFn& progress,
                      const PacketDumpFn& packets) {
  if (spec.gammas.empty()) throw ConfigError("empty load list");
  for (std::size_t i = 1; i < spec.gammas.size(); ++i) {
    if (!(spec.gammas[i] > spec.gammas[i - 1])) {
      throw ConfigError("loads must be strictly increasing");
    }
  }
  if (spec.seeds.empty()) throw ConfigError("no seeds");
  std::vector<SweepTask> tasks;
  for (Policy p : spec.policies) {
    for (Pattern q : spec.patterns) {
      tasks.push_back({p, q});
      SimConfig c = spec.base;
      c.policy = p;
      c.pattern = q;
      c.dims = shape_for_pattern(q, spec.base.dims);
      c.gamma = spec.gammas.front();
      c.validate();
    }
  }

  std::vector<TaskOutput> outputs(tasks.size());
  std::mutex callback_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      outputs[i] = run_task(spec, tasks[i], progress, packets, callback_mu);
    }
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  SweepResult res;
  for (TaskOutput& o : outputs) {
    res.rows.insert(res.rows.end(), o.rows.begin(), o.rows.end());
    res.summaries.push_back(o.summary);
    res.warnings.insert(res.warnings.end(), o.warnings.begin(), o.warnings.end());
    res.complete &= o.summary.complete;
  }
  auto key = [](const RunRow& r) {
    return std::make_tuple(r.policy, r.pattern, r.gamma, r.seed);
  };
  std::stable_sort(res.rows.begin(), res.rows.end(),
                   [&](const RunRow& a, const RunRow& b) { return key(a) < key(b); });
  std::stable_sort(res.summaries.begin(), res.summaries.end(),
                   [](const SummaryRow& a, const SummaryRow& b) {
                     return std::tie(a.policy, a.pattern) < std::tie(b.policy, b.pattern);
                   });
  return res;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& os, const SweepSpec& spec, const SweepResult& res) {
  const SimConfig& b = spec.base;
  os << "# torsim sweep\n";
  os << "# dims=" << TorusShape(b.dims).to_string() << " packet_bytes=" << b.packet_bytes
     << " capacity=" << b.capacity << " message_packets=" << b.message_packets
     << " lat_int_ns=" << b.lat_int_ns << " bw_int_gbps=" << fmt(b.bw_int_gbps, 3)
     << " lat_ext_ns=" << b.lat_ext_ns << " bw_ext_gbps=" << fmt(b.bw_ext_gbps, 3)
     << " delta=" << b.delta;
  if (b.eta) {
    os << " eta=" << *b.eta;
  } else {
    os << " eta=default(ofr=2,por=1)";
  }
  os << '\n';
  os << "# saturation lifetime_ratio=" << fmt(spec.thresholds.lifetime_ratio, 3)
     << " backlog_growth_messages=" << fmt(spec.thresholds.backlog_growth_messages, 3)
     << " min_packets=" << spec.thresholds.min_packets
     << " subwindows=" << b.subwindows << " measure_ns=" << b.measure_ns;
  if (spec.auto_warmup) {
    os << " warmup=50_messages_capped_at_" << spec.warmup_cap_ns << "ns";
  } else {
    os << " warmup_ns=" << b.warmup_ns;
  }
  os << '\n';
  for (const std::string& w : res.warnings) {
    std::string line = w.substr(0, w.find('\n'));
    os << "# warning: " << line << '\n';
  }
  os << "row,policy,pattern,dims,gamma,seed,verdict,generated,consumed,"
        "mean_lifetime_ns,median_lifetime_ns,p99_lifetime_ns,mean_hops,frac_oidn,"
        "frac_widn,frac_derouted,backlog_growth,watchdog_stalls,hop_mismatches,"
        "complete,gamma_star,sweep_limited,non_monotone\n";
  for (const RunRow& r : res.rows) {
    os << "run," << to_string(r.policy) << ',' << to_string(r.pattern) << ','
       << csv_field(r.dims) << ',' << fmt(r.gamma, 2) << ',' << r.seed << ','
       << to_string(r.verdict) << ',' << r.generated << ',' << r.consumed << ','
       << fmt(r.mean_lifetime_ns, 1) << ',' << fmt(r.median_lifetime_ns, 1) << ','
       << fmt(r.p99_lifetime_ns, 1) << ',' << fmt(r.mean_hops, 4) << ','
       << fmt(r.frac_oidn, 4) << ',' << fmt(r.frac_widn, 4) << ','
       << fmt(r.frac_derouted, 4) << ',' << r.backlog_growth << ','
       << r.watchdog_stalls << ',' << r.hop_mismatches << ','
       << (r.complete ? "yes" : "incomplete") << ",,,\n";
  }
  for (const SummaryRow& s : res.summaries) {
    os << "summary," << to_string(s.policy) << ',' << to_string(s.pattern) << ','
       << csv_field(s.dims) << ",,,,,,,,,," << fmt(s.frac_oidn, 4) << ','
       << fmt(s.frac_widn, 4) << ',' << fmt(s.frac_derouted, 4) << ",,,,"
       << (s.complete ? "yes" : "incomplete") << ',' << fmt(s.gamma_star.value, 2)
       << ',' << (s.gamma_star.sweep_limited ? "yes" : "no") << ','
       << (s.gamma_star.non_monotone ? "yes" : "no") << '\n';
  }
}

}  // namespace torsim
