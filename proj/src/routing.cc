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
#include "torsim/routing.h"

#include <limits>

namespace torsim {

std::string to_string(VcClass c) {
  switch (c) {
    case VcClass::kAdaptive: return "adaptive";
    case VcClass::kEscapeVs1: return "vs1";
    case VcClass::kEscapeVs2: return "vs2";
  }
  return "?";
}

Rational OccupancySnapshot::port_load(int port) const {
  const PortUsage& u = used[port];
  return Rational(u[0] + u[1] + u[2], vcs_per_port);
}

OccupancyStats occupancy_stats(const OccupancySnapshot& snap, const Coord& s,
                               const Coord& target, const TorusShape& shape) {
  TORSIM_EXPECTS(!(s == target), "occupancy_stats needs target != s");
  TORSIM_EXPECTS(static_cast<int>(snap.used.size()) == shape.num_ports(),
                 "snapshot must cover every output port");
  // Sum raw slot counts first; divide once to keep the fraction small.
  std::int64_t target_sum = 0;
  int target_ports = 0;
  for (LinkDir l : minimal_next_hops(s, target, shape)) {
    const PortUsage& u = snap.used[l.port()];
    target_sum += u[0] + u[1] + u[2];
    ++target_ports;
  }
  std::int64_t min_sum = std::numeric_limits<std::int64_t>::max();
  for (int p = 0; p < shape.num_ports(); ++p) {
    const PortUsage& u = snap.used[p];
    std::int64_t sum = u[0] + u[1] + u[2];
    if (sum < min_sum) min_sum = sum;
  }
  return {Rational(target_sum, std::int64_t{target_ports} * snap.vcs_per_port),
          Rational(min_sum, snap.vcs_per_port)};
}

Rational profit(const Rational& u_star, const Rational& u_q, int d,
                int d_tilde, const Rational& eta) {
  TORSIM_EXPECTS(d >= 1 && d_tilde >= d, "profit needs 1 <= d <= d_tilde");
  TORSIM_EXPECTS(!(u_q.is_zero() && !u_star.is_zero()),
                 "minimum load cannot exceed a mean load");
  Rational congestion = u_q.is_zero() ? Rational(1) : u_star / u_q;
  return congestion + eta * Rational(d, d_tilde);
}

DerouteDecision choose_idn(const Coord& s, const Coord& t,
                           const OccupancySnapshot& snap,
                           std::span<const IdnCandidate> candidates,
                           const Rational& eta, const TorusShape& shape) {
  DerouteDecision out;
  if (candidates.empty() || s == t) return out;
  const int d = torus_distance(s, t, shape);
  OccupancyStats minimal = occupancy_stats(snap, s, t, shape);
  out.minimal_profit = profit(minimal.global_min, minimal.target_mean, d, d, eta);
  out.profit = out.minimal_profit;

  std::optional<Rational> best;
  int best_index = -1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const IdnCandidate& c = candidates[i];
    OccupancyStats stats = occupancy_stats(snap, s, c.q, shape);
    Rational p = profit(stats.global_min, stats.target_mean, d, c.total_dist, eta);
    if (!best || p > *best) {
      best = p;
      best_index = static_cast<int>(i);
    }
  }
  if (best && *best > out.minimal_profit) {
    out.index = best_index;
    out.chosen = candidates[best_index].kind;
    out.idn = candidates[best_index].q;
    out.profit = *best;
  }
  return out;
}

InsertionKind insertion_kind(const QueuePosition& from, LinkDir link,
                             VcClass cls) {
  if (!from.injection && from.vc == cls && from.port == link.port()) {
    return InsertionKind::kProgress;
  }
  return InsertionKind::kInjection;
}

std::optional<OutputChoice> select_output(const Coord& here,
                                          const Coord& target,
                                          VcClass escape_class,
                                          const QueuePosition& from,
                                          const OccupancySnapshot& snap,
                                          const TorusShape& shape) {
  return select_output(minimal_next_hops(here, target, shape),
                       dim_order_next_hop(here, target, shape), escape_class, from,
                       snap);
}

std::optional<OutputChoice> select_output(PortSet minimal, LinkDir escape,
                                          VcClass escape_class,
                                          const QueuePosition& from,
                                          const OccupancySnapshot& snap) {
  TORSIM_EXPECTS(is_escape(escape_class), "escape class required");
  int best_port = -1;
  int best_used = std::numeric_limits<int>::max();
  for (LinkDir l : minimal) {
    int p = l.port();
    if (snap.link_busy(p)) continue;
    if (!admit(snap.free_slots(p, VcClass::kAdaptive), VcClass::kAdaptive,
               InsertionKind::kInjection)) {
      continue;
    }
    int used = snap.used[p][vc_index(VcClass::kAdaptive)];
    if (used < best_used) {
      best_used = used;
      best_port = p;
    }
  }
  if (best_port >= 0) {
    return OutputChoice{LinkDir::from_port(best_port), VcClass::kAdaptive,
                        InsertionKind::kInjection};
  }
  if (snap.link_busy(escape.port())) return std::nullopt;
  InsertionKind kind = insertion_kind(from, escape, escape_class);
  if (!admit(snap.free_slots(escape.port(), escape_class), escape_class, kind)) {
    return std::nullopt;
  }
  return OutputChoice{escape, escape_class, kind};
}

}  // namespace torsim
