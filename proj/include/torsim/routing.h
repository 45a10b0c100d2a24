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
#ifndef TORSIM_ROUTING_H_
#define TORSIM_ROUTING_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "torsim/flow_control.h"
#include "torsim/idn.h"
#include "torsim/rational.h"
#include "torsim/topology.h"

namespace torsim {

using PortUsage = std::array<int, kNumVcClasses>;

// Local view of the 2n output ports of one router: used slots per VC class
// in the downstream queues, as tracked by credits, plus which links are
// currently transmitting.
struct OccupancySnapshot {
  std::span<const PortUsage> used;
  PortUsage capacity{};
  // Divisor for the per-port load; VC classes absent from the router (zero
  // capacity) are not counted.
  int vcs_per_port = kNumVcClasses;
  std::uint32_t busy_ports = 0;

  int free_slots(int port, VcClass c) const {
    return capacity[vc_index(c)] - used[port][vc_index(c)];
  }
  bool link_busy(int port) const { return (busy_ports >> port) & 1u; }
  // Average used slots over the VCs of one port.
  Rational port_load(int port) const;
};

struct OccupancyStats {
  Rational target_mean;  // u_q: mean load of the minimal ports toward target
  Rational global_min;   // u_*: least loaded port of the router
};

OccupancyStats occupancy_stats(const OccupancySnapshot& snap, const Coord& s,
                               const Coord& target, const TorusShape& shape);

// u_*/u_q + eta * d / d_tilde, with the first term pinned to one when both
// loads are zero.
Rational profit(const Rational& u_star, const Rational& u_q, int d,
                int d_tilde, const Rational& eta);

struct DerouteDecision {
  int index = -1;  // position in the candidate list, -1 for minimal routing
  IdnKind chosen;
  Coord idn;
  Rational profit;          // profit of the chosen route
  Rational minimal_profit;  // pi_0

  bool derouted() const { return index >= 0; }
};

// Injection-time choice between minimal routing and the candidate IDNs.
// Minimal routing wins ties with any candidate; among candidates the lowest
// index wins.
DerouteDecision choose_idn(const Coord& s, const Coord& t,
                           const OccupancySnapshot& snap,
                           std::span<const IdnCandidate> candidates,
                           const Rational& eta, const TorusShape& shape);

// Where a packet currently sits inside a router.
struct QueuePosition {
  bool injection = true;
  int port = -1;  // input port, numbered by the direction of travel
  VcClass vc = VcClass::kAdaptive;

  static QueuePosition injection_queue() { return {}; }
  static QueuePosition input(int port, VcClass vc) { return {false, port, vc}; }
};

struct OutputChoice {
  LinkDir link;
  VcClass vc = VcClass::kAdaptive;
  InsertionKind insertion = InsertionKind::kInjection;
};

// Insertion kind for moving from `from` into escape class `cls` on `link`.
InsertionKind insertion_kind(const QueuePosition& from, LinkDir link,
                             VcClass cls);

// Per-hop output selection: the least occupied adaptive VC among the minimal
// ports toward `target` (ties to the lowest port), else the dimension-order
// escape VC of `escape_class` if the bubble rule admits it, else nothing.
// Ports whose link is busy are skipped.
std::optional<OutputChoice> select_output(const Coord& here,
                                          const Coord& target,
                                          VcClass escape_class,
                                          const QueuePosition& from,
                                          const OccupancySnapshot& snap,
                                          const TorusShape& shape);

// Same decision from precomputed minimal ports and dimension-order port.
std::optional<OutputChoice> select_output(PortSet minimal, LinkDir escape,
                                          VcClass escape_class,
                                          const QueuePosition& from,
                                          const OccupancySnapshot& snap);

}  // namespace torsim

#endif  // TORSIM_ROUTING_H_
