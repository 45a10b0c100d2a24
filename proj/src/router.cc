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
#include "torsim/router.h"

namespace torsim {

RouterNode::RouterNode(int id, const Coord& coord, const TorusShape& shape,
                       const RouterParams& params)
    : id_(id),
      coord_(coord),
      shape_(&shape),
      params_(params),
      num_ports_(shape.num_ports()) {
  TORSIM_EXPECTS(params.capacity >= 2,
                 "escape queues need at least two slots for the bubble rule");
  vc_capacity_ = {params.capacity, params.vs1_enabled ? params.capacity : 0,
                  params.capacity};
  vcs_per_port_ = params.vs1_enabled ? 3 : 2;
  queues_.reserve(static_cast<std::size_t>(num_queues()));
  queues_.emplace_back(VcClass::kAdaptive, params.capacity);
  for (int p = 0; p < num_ports_; ++p) {
    for (int c = 0; c < kNumVcClasses; ++c) {
      queues_.emplace_back(static_cast<VcClass>(c), vc_capacity_[c]);
    }
  }
  used_.assign(static_cast<std::size_t>(num_ports_), PortUsage{});
  link_free_at_.assign(static_cast<std::size_t>(num_ports_), 0);
}

QueuePosition RouterNode::position(int q) const {
  if (q == 0) return QueuePosition::injection_queue();
  int idx = q - 1;
  return QueuePosition::input(idx / kNumVcClasses,
                              static_cast<VcClass>(idx % kNumVcClasses));
}

void RouterNode::credit_update(int port, VcClass c, CreditEvent ev) {
  int& u = used_[port][vc_index(c)];
  if (ev == CreditEvent::kSent) {
    TORSIM_EXPECTS(u < vc_capacity_[vc_index(c)], "credit underflow");
    ++u;
  } else {
    TORSIM_EXPECTS(u > 0, "credit overflow");
    --u;
  }
}

OccupancySnapshot RouterNode::snapshot(SimTime now) const {
  OccupancySnapshot snap;
  snap.used = used_;
  snap.capacity = vc_capacity_;
  snap.vcs_per_port = vcs_per_port_;
  for (int p = 0; p < num_ports_; ++p) {
    if (link_free_at_[p] > now) snap.busy_ports |= 1u << p;
  }
  return snap;
}

ForwardAction RouterNode::on_head_of_queue(Packet& packet,
                                           const QueuePosition& pos,
                                           SimTime now) const {
  ForwardAction action;
  if (pos.injection && !packet.routed) {
    packet.routed = true;
    action.decided = true;
    if (!(packet.src == packet.dst)) {
      std::vector<IdnCandidate> cands = candidate_set(
          packet.src, packet.dst, params_.policy, params_.delta, *shape_);
      if (!cands.empty()) {
        DerouteDecision d = choose_idn(packet.src, packet.dst, snapshot(now),
                                       cands, params_.eta, *shape_);
        if (d.derouted()) {
          packet.idn = d.idn;
          packet.idn_kind = d.chosen;
          packet.phase = Phase::kToIdn;
        }
      }
    }
  }
  if (packet.phase == Phase::kToIdn && packet.idn == coord_) {
    packet.phase = Phase::kToDest;
    ++packet.phase_switches;
    action.phase_switched = true;
  }
  if (packet.phase == Phase::kToDest && packet.dst == coord_) {
    action.kind = sink_busy(now) ? ForwardAction::Kind::kHold
                                 : ForwardAction::Kind::kDeliver;
    return action;
  }
  if (packet.route_node != id_ || action.phase_switched) {
    packet.route_node = id_;
    packet.route_minimal = minimal_next_hops(coord_, packet.target(), *shape_);
    packet.route_escape = dim_order_next_hop(coord_, packet.target(), *shape_);
  }
  std::optional<OutputChoice> out =
      select_output(packet.route_minimal, packet.route_escape,
                    escape_class_for(packet), pos, snapshot(now));
  if (out) {
    action.kind = ForwardAction::Kind::kForward;
    action.out = *out;
  }
  return action;
}

}  // namespace torsim
