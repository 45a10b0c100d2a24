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
#ifndef TORSIM_ROUTER_H_
#define TORSIM_ROUTER_H_

#include <cstdint>
#include <vector>

#include "torsim/flow_control.h"
#include "torsim/idn.h"
#include "torsim/rational.h"
#include "torsim/routing.h"
#include "torsim/topology.h"

namespace torsim {

// Simulated time in nanoseconds.
using SimTime = std::int64_t;

enum class Phase : std::uint8_t { kToIdn, kToDest };

struct Packet {
  std::uint64_t id = 0;
  Coord src;
  Coord dst;
  Coord idn;  // meaningful only when idn_kind.type != kNone
  IdnKind idn_kind;
  Phase phase = Phase::kToDest;
  bool routed = false;  // injection-time deroute decision taken
  int hops = 0;
  int phase_switches = 0;
  SimTime created_at = 0;
  SimTime consumed_at = -1;
  // Next hops toward target() cached for the router at route_node.
  int route_node = -1;
  PortSet route_minimal;
  LinkDir route_escape;

  bool has_idn() const { return idn_kind.type != IdnType::kNone; }
  const Coord& target() const { return phase == Phase::kToIdn ? idn : dst; }
};

// Packets heading for an IDN use the first escape subnetwork; everything
// routed toward its final destination uses the second.
inline VcClass escape_class_for(const Packet& p) {
  return p.phase == Phase::kToIdn ? VcClass::kEscapeVs1 : VcClass::kEscapeVs2;
}

struct RouterParams {
  Policy policy = Policy::kOfr;
  int capacity = 8;
  int delta = 2;
  Rational eta{2};
  // When false the router has only the adaptive VC and one escape VC
  // (VS2); only meaningful for ABR, which never uses VS1.
  bool vs1_enabled = true;
};

enum class CreditEvent : std::uint8_t { kSent, kReturned };

struct ForwardAction {
  enum class Kind : std::uint8_t { kHold, kDeliver, kForward };
  Kind kind = Kind::kHold;
  OutputChoice out;
  bool phase_switched = false;
  bool decided = false;  // the injection-time decision was taken now
};

// Per-node switching state. Input queues are indexed by (input port, VC
// class) where the input port is numbered by the direction of travel of the
// link feeding it. Output ports carry credit counters mirroring the free
// slots of the downstream input queues.
class RouterNode {
 public:
  RouterNode(int id, const Coord& coord, const TorusShape& shape,
             const RouterParams& params);

  int id() const { return id_; }
  const Coord& coord() const { return coord_; }
  const RouterParams& params() const { return params_; }

  // Queue 0 is the injection queue; queue 1 + 3*port + class is an input VC.
  int num_queues() const { return 1 + kNumVcClasses * num_ports_; }
  VirtualChannel& queue(int q) { return queues_[q]; }
  const VirtualChannel& queue(int q) const { return queues_[q]; }
  static int input_queue_index(int port, VcClass c) {
    return 1 + kNumVcClasses * port + vc_index(c);
  }
  QueuePosition position(int q) const;
  VirtualChannel& injection() { return queues_[0]; }
  VirtualChannel& input(int port, VcClass c) {
    return queues_[input_queue_index(port, c)];
  }

  int vc_capacity(VcClass c) const { return vc_capacity_[vc_index(c)]; }
  int credits(int port, VcClass c) const {
    return vc_capacity_[vc_index(c)] - used_[port][vc_index(c)];
  }
  // Sent consumes one credit of the downstream VC, kReturned gives it back.
  // Throws ContractViolation on underflow or overflow.
  void credit_update(int port, VcClass c, CreditEvent ev);

  bool link_busy(int port, SimTime now) const { return link_free_at_[port] > now; }
  SimTime link_free_at(int port) const { return link_free_at_[port]; }
  void occupy_link(int port, SimTime until) { link_free_at_[port] = until; }
  bool sink_busy(SimTime now) const { return sink_free_at_ > now; }
  SimTime sink_free_at() const { return sink_free_at_; }
  void occupy_sink(SimTime until) { sink_free_at_ = until; }

  OccupancySnapshot snapshot(SimTime now) const;

  // Decide what to do with the packet at the head of queue `pos`. May set
  // the packet's IDN (first look from the injection queue) and switch its
  // phase when it stands on its IDN; never moves it.
  ForwardAction on_head_of_queue(Packet& packet, const QueuePosition& pos,
                                 SimTime now) const;

  int round_robin() const { return rr_; }
  void set_round_robin(int q) { rr_ = q; }

 private:
  int id_;
  Coord coord_;
  const TorusShape* shape_;
  RouterParams params_;
  int num_ports_;
  PortUsage vc_capacity_{};
  int vcs_per_port_;
  std::vector<VirtualChannel> queues_;
  std::vector<PortUsage> used_;  // capacity - credits, per output port
  std::vector<SimTime> link_free_at_;
  SimTime sink_free_at_ = 0;
  int rr_ = 0;
};

}  // namespace torsim

#endif  // TORSIM_ROUTER_H_
