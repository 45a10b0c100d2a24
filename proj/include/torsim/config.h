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
#ifndef TORSIM_CONFIG_H_
#define TORSIM_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "torsim/harness.h"

namespace torsim {

// "80", "80ns", "2.5us", "10ms", "1s" -> nanoseconds.
SimTime parse_duration_ns(const std::string& text);
// "20", "20Gb/s", "20Gbps", "500Mb/s" -> Gb/s.
double parse_bandwidth_gbps(const std::string& text);
// "0.5", "0.1,0.2,0.3" or "start:stop:step" (inclusive). Values are rounded
// to 1e-6 and must end up strictly increasing.
std::vector<double> parse_gamma_list(const std::string& text);
// "1", "1,2,3" or "first:last".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
// "8x8x8" or "8,8,8".
std::vector<int> parse_dims(const std::string& text);
// Comma lists; "all" selects every value.
std::vector<Policy> parse_policy_list(const std::string& text);
std::vector<Pattern> parse_pattern_list(const std::string& text);

struct CliOptions {
  SweepSpec spec;
  std::string out;           // CSV path; empty writes to stdout
  std::string emit_packets;  // per-packet CSV dump path; empty disables
  bool quiet = false;
  bool help = false;
};

// Parses command-line arguments (args[0] is the program name). A --config
// file holds flat key=value lines using the long flag names; flags given on
// the command line override it. Throws ConfigError. `usage` receives the
// help text when --help is given.
CliOptions parse_cli(const std::vector<std::string>& args, std::ostream& usage);

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitIncomplete = 3 };

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace torsim

#endif  // TORSIM_CONFIG_H_
