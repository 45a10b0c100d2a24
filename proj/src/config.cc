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
#include "torsim/config.h"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

namespace torsim {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad " + what + ": '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError("bad " + what + ": '" + text + "'");
  }
  return v;
}

long long to_integer(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad " + what + ": '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("bad " + what + ": '" + text + "'");
  return v;
}

// Splits "12.5us" into 12.5 and "us".
std::pair<double, std::string> number_with_unit(const std::string& raw,
                                                const std::string& what) {
  std::string text = trim(raw);
  std::size_t i = 0;
  while (i < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
          text[i] == '-' || text[i] == '+' || text[i] == 'e' || text[i] == 'E')) {
    // an 'e' that does not continue an exponent starts the unit
    if ((text[i] == 'e' || text[i] == 'E') &&
        (i + 1 >= text.size() || !(std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                                   text[i + 1] == '-' || text[i + 1] == '+'))) {
      break;
    }
    ++i;
  }
  return {to_number(text.substr(0, i), what), trim(text.substr(i))};
}

}  // namespace

SimTime parse_duration_ns(const std::string& text) {
  auto [v, unit] = number_with_unit(text, "duration");
  double scale = 0;
  if (unit.empty() || unit == "ns") {
    scale = 1;
  } else if (unit == "us") {
    scale = 1e3;
  } else if (unit == "ms") {
    scale = 1e6;
  } else if (unit == "s") {
    scale = 1e9;
  } else {
    throw ConfigError("unknown time unit in '" + text + "'");
  }
  if (v < 0) throw ConfigError("negative duration: '" + text + "'");
  return static_cast<SimTime>(std::llround(v * scale));
}

double parse_bandwidth_gbps(const std::string& text) {
  auto [v, unit] = number_with_unit(text, "bandwidth");
  double scale = 0;
  if (unit.empty() || unit == "Gb/s" || unit == "Gbps" || unit == "Gbit/s") {
    scale = 1;
  } else if (unit == "Mb/s" || unit == "Mbps" || unit == "Mbit/s") {
    scale = 1e-3;
  } else if (unit == "Tb/s" || unit == "Tbps") {
    scale = 1e3;
  } else {
    throw ConfigError("unknown bandwidth unit in '" + text + "'");
  }
  if (!(v > 0)) throw ConfigError("bandwidth must be positive: '" + text + "'");
  return v * scale;
}

std::vector<double> parse_gamma_list(const std::string& text) {
  auto round6 = [](double v) { return std::round(v * 1e6) / 1e6; };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("gamma range is start:stop:step, got '" + text + "'");
    double a = to_number(parts[0], "gamma");
    double b = to_number(parts[1], "gamma");
    double step = to_number(parts[2], "gamma step");
    if (!(step > 0) || b < a) throw ConfigError("bad gamma range '" + text + "'");
    auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(round6(a + static_cast<double>(i) * step));
  } else {
    for (const std::string& p : split(text, ',')) out.push_back(round6(to_number(p, "gamma")));
  }
  if (out.empty()) throw ConfigError("empty gamma list");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0) throw ConfigError("gamma must be >= 0");
    if (i > 0 && !(out[i] > out[i - 1])) {
      throw ConfigError("gamma values must be strictly increasing: '" + text + "'");
    }
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find(':') != std::string::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 2) throw ConfigError("seed range is first:last, got '" + text + "'");
    long long a = to_integer(parts[0], "seed");
    long long b = to_integer(parts[1], "seed");
    if (a < 0 || b < a) throw ConfigError("bad seed range '" + text + "'");
    for (long long s = a; s <= b; ++s) out.push_back(static_cast<std::uint64_t>(s));
  } else {
    for (const std::string& p : split(text, ',')) {
      long long s = to_integer(p, "seed");
      if (s < 0) throw ConfigError("seeds must be non-negative");
      out.push_back(static_cast<std::uint64_t>(s));
    }
  }
  return out;
}

std::vector<int> parse_dims(const std::string& text) {
  char sep = text.find('x') != std::string::npos ? 'x' : ',';
  std::vector<int> out;
  for (const std::string& p : split(text, sep)) {
    out.push_back(static_cast<int>(to_integer(p, "radix")));
  }
  try {
    TorusShape check(out);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return out;
}

std::vector<Policy> parse_policy_list(const std::string& text) {
  if (trim(text) == "all") return {Policy::kAbr, Policy::kPor, Policy::kOfr};
  std::vector<Policy> out;
  for (const std::string& p : split(text, ',')) {
    try {
      out.push_back(parse_policy(p));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

std::vector<Pattern> parse_pattern_list(const std::string& text) {
  if (trim(text) == "all") {
    return {Pattern::kUniform, Pattern::kButterfly, Pattern::kTranspose,
            Pattern::kTranspose3d, Pattern::kBitReverse};
  }
  std::vector<Pattern> out;
  for (const std::string& p : split(text, ',')) out.push_back(parse_pattern(p));
  return out;
}

CliOptions parse_cli(const std::vector<std::string>& args, std::ostream& usage) {
  CliOptions opt;
  SimConfig& cfg = opt.spec.base;
  CLI::App app{"Torus interconnect simulator: offered-load sweeps and saturation throughput",
               args.empty() ? "torsim" : args[0]};

  std::string k, n = "3", dims, policy = "ofr", pattern = "uniform";
  std::string gamma, seed = "1", eta, warmup, measure;
  std::string lat_int = "80ns", lat_ext = "200ns", bw_int = "64Gb/s", bw_ext = "20Gb/s";
  std::string drain = "0", warmup_cap = "1ms";
  int abr_vcs = 3;

  app.set_config("--config", "", "flat key=value file; command-line flags override it");
  app.add_option("--k", k, "radix of every dimension (with --n)");
  app.add_option("--n", n, "number of dimensions for --k")->capture_default_str();
  // Config files hand comma lists over as arrays; join them back.
  app.add_option("--dims", dims, "per-dimension radices, e.g. 16x8x8")->join(',');
  app.add_option("--policy", policy, "abr, por, ofr, a comma list or all")
      ->join(',')
      ->capture_default_str();
  app.add_option("--pattern", pattern,
                 "uniform, butterfly, transpose, transpose3d, bitrev, a comma list or all")
      ->join(',')
      ->capture_default_str();
  app.add_option("--gamma", gamma, "offered loads: list or start:stop:step (default 0.05:1:0.05)")
      ->join(',');
  app.add_option("--delta", cfg.delta, "OIDN offset")->capture_default_str();
  app.add_option("--eta", eta, "profit weight (default 2 for ofr, 1 for por)");
  app.add_option("--capacity", cfg.capacity, "packets per virtual channel")->capture_default_str();
  app.add_option("--packet-size", cfg.packet_bytes, "bytes per packet")->capture_default_str();
  app.add_option("--message-size", cfg.message_packets, "packets per message")
      ->capture_default_str();
  app.add_option("--lat-int", lat_int, "internal link latency")->capture_default_str();
  app.add_option("--bw-int", bw_int, "internal link bandwidth")->capture_default_str();
  app.add_option("--lat-ext", lat_ext, "external link latency")->capture_default_str();
  app.add_option("--bw-ext", bw_ext, "external link bandwidth")->capture_default_str();
  app.add_option("--seed", seed, "seeds: list or first:last")
      ->join(',')
      ->capture_default_str();
  app.add_option("--warmup", warmup, "fixed warmup time (default: 50 messages per node, capped)");
  app.add_option("--warmup-cap", warmup_cap, "cap of the default warmup")
      ->capture_default_str();
  app.add_option("--measure", measure, "measurement window (default 1ms)");
  app.add_option("--subwindows", cfg.subwindows, "measurement sub-windows")
      ->capture_default_str();
  app.add_option("--drain", drain, "drain time after the measurement window")
      ->capture_default_str();
  app.add_option("--lifetime-ratio", opt.spec.thresholds.lifetime_ratio,
                 "saturation: last/first sub-window lifetime ratio")
      ->capture_default_str();
  app.add_option("--backlog-growth", opt.spec.thresholds.backlog_growth_messages,
                 "saturation: backlog growth in messages per node")
      ->capture_default_str();
  app.add_option("--min-packets", opt.spec.thresholds.min_packets,
                 "fewer consumed packets give an inconclusive verdict")
      ->capture_default_str();
  app.add_option("--abr-vcs", abr_vcs, "virtual channels per port under abr (2 or 3)")
      ->capture_default_str();
  app.add_option("--jobs", opt.spec.jobs, "concurrent (policy, pattern) sweeps")
      ->capture_default_str();
  app.add_option("--stop-after", opt.spec.stop_after_saturated,
                 "stop a sweep after this many saturated loads (0 = never)")
      ->capture_default_str();
  app.add_flag("--early-majority", opt.spec.early_majority,
               "skip remaining seeds once a load's majority is decided");
  app.add_option("--out", opt.out, "CSV output path (default stdout)");
  app.add_option("--emit-packets", opt.emit_packets, "per-packet CSV dump path");
  app.add_flag("--quiet", opt.quiet, "no progress lines on stderr");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("torsim");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    usage << app.help();
    opt.help = true;
    return opt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  if (!dims.empty() && !k.empty()) throw ConfigError("give either --k or --dims, not both");
  if (!dims.empty()) {
    cfg.dims = parse_dims(dims);
  } else if (!k.empty()) {
    long long kk = to_integer(k, "k");
    long long nn = to_integer(n, "n");
    if (nn < 1 || nn > 6) throw ConfigError("--n must be in 1..6");
    cfg.dims.assign(static_cast<std::size_t>(nn), static_cast<int>(kk));
    parse_dims(std::to_string(kk));
  }
  opt.spec.policies = parse_policy_list(policy);
  opt.spec.patterns = parse_pattern_list(pattern);
  opt.spec.gammas = gamma.empty() ? default_gammas() : parse_gamma_list(gamma);
  opt.spec.seeds = parse_seed_list(seed);
  if (!eta.empty()) {
    try {
      cfg.eta = Rational::parse(eta);
    } catch (const std::exception&) {
      throw ConfigError("bad eta: '" + eta + "'");
    }
  }
  cfg.lat_int_ns = parse_duration_ns(lat_int);
  cfg.lat_ext_ns = parse_duration_ns(lat_ext);
  cfg.bw_int_gbps = parse_bandwidth_gbps(bw_int);
  cfg.bw_ext_gbps = parse_bandwidth_gbps(bw_ext);
  if (!warmup.empty()) {
    cfg.warmup_ns = parse_duration_ns(warmup);
    opt.spec.auto_warmup = false;
  }
  if (!measure.empty()) cfg.measure_ns = parse_duration_ns(measure);
  cfg.drain_ns = parse_duration_ns(drain);
  opt.spec.warmup_cap_ns = parse_duration_ns(warmup_cap);
  if (abr_vcs != 2 && abr_vcs != 3) throw ConfigError("--abr-vcs must be 2 or 3");
  cfg.abr_two_vcs = abr_vcs == 2;
  if (opt.spec.jobs < 1) throw ConfigError("--jobs must be at least 1");
  if (opt.spec.stop_after_saturated < 0) throw ConfigError("--stop-after must be >= 0");
  if (cfg.subwindows < 4) throw ConfigError("saturation detection needs --subwindows >= 4");
  return opt;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliOptions opt;
  try {
    opt = parse_cli(args, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (opt.help) return kExitOk;

  std::ofstream packets_file;
  PacketDumpFn dump;
  if (!opt.emit_packets.empty()) {
    packets_file.open(opt.emit_packets);
    if (!packets_file) {
      err << "config error: cannot open " << opt.emit_packets << '\n';
      return kExitConfig;
    }
    packets_file << "policy,pattern,gamma,seed,id,src,dst,idn,kind,hops,created_ns,consumed_ns\n";
    dump = [&packets_file](const SimConfig& c, const PacketRecord& r) {
      packets_file << to_string(c.policy) << ',' << to_string(c.pattern) << ',' << c.gamma
                   << ',' << c.seed << ',' << r.id << ',' << r.src << ',' << r.dst << ','
                   << r.idn << ',' << to_string(r.kind) << ',' << r.hops << ','
                   << r.created_at << ',' << r.consumed_at << '\n';
    };
  }
  std::ofstream csv_file;
  if (!opt.out.empty()) {
    csv_file.open(opt.out);
    if (!csv_file) {
      err << "config error: cannot open " << opt.out << '\n';
      return kExitConfig;
    }
  }

  ProgressFn progress;
  if (!opt.quiet) {
    progress = [&err](const RunRow& r) {
      err << to_string(r.policy) << ' ' << to_string(r.pattern) << ' ' << r.dims
          << " gamma=" << r.gamma << " seed=" << r.seed << ": " << to_string(r.verdict)
          << " mean_lifetime=" << r.mean_lifetime_ns << "ns consumed=" << r.consumed
          << std::endl;
    };
  }

  SweepResult res;
  try {
    res = run_sweep(opt.spec, progress, dump);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const std::string& w : res.warnings) err << "warning: " << w << '\n';
  write_csv(opt.out.empty() ? out : csv_file, opt.spec, res);
  if (!res.complete) {
    err << "sweep incomplete\n";
    return kExitIncomplete;
  }
  return kExitOk;
}

}  // namespace torsim
