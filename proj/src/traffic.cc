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
#include "torsim/traffic.h"

#include <bit>
#include <vector>

namespace torsim {

std::string to_string(Pattern p) {
  switch (p) {
    case Pattern::kUniform: return "uniform";
    case Pattern::kButterfly: return "butterfly";
    case Pattern::kTranspose: return "transpose";
    case Pattern::kTranspose3d: return "transpose3d";
    case Pattern::kBitReverse: return "bitrev";
  }
  return "?";
}

Pattern parse_pattern(const std::string& name) {
  if (name == "uniform") return Pattern::kUniform;
  if (name == "butterfly") return Pattern::kButterfly;
  if (name == "transpose") return Pattern::kTranspose;
  if (name == "transpose3d") return Pattern::kTranspose3d;
  if (name == "bitrev") return Pattern::kBitReverse;
  throw ConfigError("unknown pattern: " + name);
}

bool is_permutation(Pattern p) { return p != Pattern::kUniform; }

TrafficPattern::TrafficPattern(Pattern pattern, const TorusShape& shape)
    : pattern_(pattern), shape_(shape), nodes_(shape.num_nodes()) {
  const auto n = static_cast<unsigned>(nodes_);
  switch (pattern_) {
    case Pattern::kUniform:
      break;
    case Pattern::kButterfly:
    case Pattern::kBitReverse:
      if (!std::has_single_bit(n)) {
        throw ConfigError(to_string(pattern_) + " needs a power-of-two node count, got " +
                          std::to_string(nodes_));
      }
      bits_ = std::countr_zero(n);
      break;
    case Pattern::kTranspose: {
      int side = 1;
      while (side * side < nodes_) ++side;
      if (side * side != nodes_) {
        throw ConfigError("transpose needs a square node count, got " +
                          std::to_string(nodes_) + " on " + shape.to_string());
      }
      side_ = side;
      break;
    }
    case Pattern::kTranspose3d:
      if (shape.dims() != 3 || !shape.is_cubic()) {
        throw ConfigError("transpose3d needs a k x k x k torus, got " +
                          shape.to_string());
      }
      break;
  }
}

int TrafficPattern::destination(int source, std::uint64_t message_index,
                                std::mt19937_64& rng) const {
  switch (pattern_) {
    case Pattern::kUniform: {
      std::uniform_int_distribution<int> pick(0, nodes_ - 2);
      int d = pick(rng);
      return d >= source ? d + 1 : d;
    }
    case Pattern::kButterfly: {
      int bit = static_cast<int>(message_index % static_cast<std::uint64_t>(bits_));
      return source ^ (1 << bit);
    }
    case Pattern::kTranspose: {
      int row = source / side_;
      int col = source % side_;
      return col * side_ + row;
    }
    case Pattern::kTranspose3d: {
      Coord c = shape_.coord_of(source);
      return shape_.index_of(Coord{c[1], c[2], c[0]});
    }
    case Pattern::kBitReverse: {
      int out = 0;
      for (int b = 0; b < bits_; ++b) {
        if ((source >> b) & 1) out |= 1 << (bits_ - 1 - b);
      }
      return out;
    }
  }
  return source;
}

void TrafficPattern::verify_bijection() const {
  if (!is_permutation(pattern_)) return;
  std::mt19937_64 unused;
  int variants = pattern_ == Pattern::kButterfly ? bits_ : 1;
  for (int v = 0; v < variants; ++v) {
    std::vector<char> hit(static_cast<std::size_t>(nodes_), 0);
    for (int s = 0; s < nodes_; ++s) {
      int d = destination(s, static_cast<std::uint64_t>(v), unused);
      if (d < 0 || d >= nodes_ || hit[d]) {
        throw ConfigError(to_string(pattern_) + " is not a bijection on " +
                          shape_.to_string());
      }
      hit[d] = 1;
    }
  }
}

}  // namespace torsim
