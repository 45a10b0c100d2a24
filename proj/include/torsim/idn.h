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
#ifndef TORSIM_IDN_H_
#define TORSIM_IDN_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "torsim/topology.h"

namespace torsim {

enum class Policy : std::uint8_t { kAbr, kPor, kOfr };

std::string to_string(Policy p);
Policy parse_policy(const std::string& name);

enum class IdnType : std::uint8_t { kNone, kWidn, kOidn };

std::string to_string(IdnType t);

// Which intermediate destination a packet was given, with the vector that
// generated it: beta in {0,1}^n for wraparound IDNs, lambda in {-1,0,1}^n
// for outflank IDNs (in the real, unpermuted frame).
struct IdnKind {
  IdnType type = IdnType::kNone;
  int n = 0;
  std::array<std::int8_t, kMaxDims> params{};

  static IdnKind none() { return {}; }
  bool operator==(const IdnKind&) const = default;
  std::string to_string() const;
};

struct IdnCandidate {
  Coord q;
  IdnKind kind;
  int total_dist = 0;  // d(s,q) + d(q,t)
  int dilation = 0;    // total_dist - d(s,t)
};

// Midpoint of the orthant selected by beta:
// q_i = floor((s_i + t_i + beta_i * k_i) / 2) mod k_i.
Coord widn(const Coord& s, const Coord& t, std::span<const int> beta,
           const TorusShape& shape);

// Outflank IDN for the given lambda and offset delta. Dimensions where s and
// t differ use s_i -/+ delta when the chosen link at s is non-minimal and
// t_i -/+ delta when it is minimal; lambda_i = 0 picks the midpoint of the
// minimal arc. Dimensions where s_i = t_i move by lambda_i * delta.
// Throws std::invalid_argument for an all-zero lambda.
Coord oidn(const Coord& s, const Coord& t, std::span<const int> lambda,
           int delta, const TorusShape& shape);

int dilation(const Coord& s, const Coord& q, const Coord& t,
             const TorusShape& shape);

// The beta vector whose WIDN sits in the minimal orthant.
std::array<int, kMaxDims> minimal_beta(const Coord& s, const Coord& t,
                                       const TorusShape& shape);

// Candidate IDNs examined when a packet is injected, in tie-break order:
// outflank IDNs in listing order first, then wraparound IDNs by increasing
// binary value of beta (beta_0 is the least significant bit). ABR gets an
// empty set. POR gets only the wraparound IDNs of the non-minimal orthants.
// Outflank lists exist for 2 and 3 dimensions; OFR on other ranks throws
// std::invalid_argument. Candidates landing on s or t are dropped.
std::vector<IdnCandidate> candidate_set(const Coord& s, const Coord& t,
                                        Policy policy, int delta,
                                        const TorusShape& shape);

// Canonical outflank lambda lists. The canonical frame orders dimensions
// with equal coordinates first (3D) or the differing dimension first (2D,
// collinear) and orients every minimal link positively.
std::vector<std::array<int, 3>> oidn_lambdas_3d(int differing_dims);
std::vector<std::array<int, 2>> oidn_lambdas_2d(int differing_dims);

}  // namespace torsim

#endif  // TORSIM_IDN_H_
