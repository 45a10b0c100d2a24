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
#ifndef TORSIM_TRAFFIC_H_
#define TORSIM_TRAFFIC_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "torsim/topology.h"

namespace torsim {

// Invalid simulator or sweep configuration (bad flag, pattern that does not
// fit the torus, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Pattern : std::uint8_t {
  kUniform,
  kButterfly,
  kTranspose,
  kTranspose3d,
  kBitReverse,
};

std::string to_string(Pattern p);
Pattern parse_pattern(const std::string& name);
bool is_permutation(Pattern p);

// Destination generator. Index-based patterns work on the row-major node
// index (dimension 0 most significant), with bit 0 the least significant.
class TrafficPattern {
 public:
  // Throws ConfigError if the torus does not satisfy the pattern's
  // preconditions (square node count, power-of-two node count, cube).
  TrafficPattern(Pattern pattern, const TorusShape& shape);

  Pattern pattern() const { return pattern_; }

  // Destination node index of the message_index-th message from `source`.
  // Only Uniform draws from rng. May return `source` for permutation fixed
  // points.
  int destination(int source, std::uint64_t message_index,
                  std::mt19937_64& rng) const;

  // Checks that every deterministic map is a bijection on the nodes.
  // Throws ConfigError otherwise.
  void verify_bijection() const;

 private:
  Pattern pattern_;
  TorusShape shape_;
  int nodes_;
  int bits_ = 0;  // log2(nodes) for the bit patterns
  int side_ = 0;  // sqrt(nodes) for transposition
};

}  // namespace torsim

#endif  // TORSIM_TRAFFIC_H_
