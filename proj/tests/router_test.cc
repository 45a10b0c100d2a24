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
#include <catch_amalgamated.hpp>

#include "torsim/router.h"

using namespace torsim;

namespace {

const TorusShape k8({8, 8, 8});

Packet make_packet(const Coord& s, const Coord& t) {
  Packet p;
  p.src = s;
  p.dst = t;
  return p;
}

void fill(RouterNode& r, int port, VcClass c, int n) {
  for (int i = 0; i < n; ++i) r.credit_update(port, c, CreditEvent::kSent);
}

}  // namespace

TEST_CASE("bubble rule") {
  CHECK_FALSE(admit(1, VcClass::kEscapeVs1, InsertionKind::kInjection));
  CHECK(admit(2, VcClass::kEscapeVs1, InsertionKind::kInjection));
  CHECK(admit(1, VcClass::kEscapeVs2, InsertionKind::kProgress));
  CHECK_FALSE(admit(0, VcClass::kEscapeVs2, InsertionKind::kProgress));
  CHECK(admit(1, VcClass::kAdaptive, InsertionKind::kInjection));
  CHECK_FALSE(admit(0, VcClass::kAdaptive, InsertionKind::kProgress));

  VirtualChannel vc(VcClass::kEscapeVs2, 3);
  vc.push(1);
  CHECK(vc.admits(InsertionKind::kInjection));
  vc.push(2);
  CHECK_FALSE(vc.admits(InsertionKind::kInjection));
  CHECK(vc.admits(InsertionKind::kProgress));
  CHECK(vc.pop() == 1);
  CHECK(vc.front() == 2);
  vc.push(3);
  vc.push(4);
  CHECK_THROWS_AS(vc.push(5), ContractViolation);
  CHECK(vc.at(2) == 4);
}

TEST_CASE("escape class by phase") {
  Packet p = make_packet(Coord{0, 0, 0}, Coord{1, 2, 3});
  CHECK(escape_class_for(p) == VcClass::kEscapeVs2);
  p.phase = Phase::kToIdn;
  CHECK(escape_class_for(p) == VcClass::kEscapeVs1);
  p.phase = Phase::kToDest;
  CHECK(escape_class_for(p) == VcClass::kEscapeVs2);
}

TEST_CASE("credits") {
  RouterParams params;
  RouterNode r(0, Coord{0, 0, 0}, k8, params);
  for (int p = 0; p < 6; ++p) {
    for (VcClass c : {VcClass::kAdaptive, VcClass::kEscapeVs1, VcClass::kEscapeVs2}) {
      CHECK(r.credits(p, c) == 8);
    }
  }
  r.credit_update(3, VcClass::kEscapeVs1, CreditEvent::kSent);
  CHECK(r.credits(3, VcClass::kEscapeVs1) == 7);
  r.credit_update(3, VcClass::kEscapeVs1, CreditEvent::kReturned);
  CHECK(r.credits(3, VcClass::kEscapeVs1) == 8);
  CHECK_THROWS_AS(r.credit_update(3, VcClass::kEscapeVs1, CreditEvent::kReturned),
                  ContractViolation);
  fill(r, 2, VcClass::kAdaptive, 8);
  CHECK_THROWS_AS(r.credit_update(2, VcClass::kAdaptive, CreditEvent::kSent),
                  ContractViolation);

  params.policy = Policy::kAbr;
  params.vs1_enabled = false;
  RouterNode abr(0, Coord{0, 0, 0}, k8, params);
  CHECK(abr.credits(0, VcClass::kEscapeVs1) == 0);
  CHECK(abr.snapshot(0).vcs_per_port == 2);
  CHECK(r.snapshot(0).vcs_per_port == 3);
}

TEST_CASE("queue numbering") {
  RouterNode r(0, Coord{0, 0, 0}, k8, RouterParams{});
  CHECK(r.num_queues() == 19);
  for (int q = 1; q < r.num_queues(); ++q) {
    QueuePosition pos = r.position(q);
    CHECK_FALSE(pos.injection);
    CHECK(RouterNode::input_queue_index(pos.port, pos.vc) == q);
    CHECK(r.queue(q).vc_class() == pos.vc);
  }
  CHECK(r.position(0).injection);
}

TEST_CASE("busy links show in the snapshot") {
  RouterNode r(0, Coord{0, 0, 0}, k8, RouterParams{});
  r.occupy_link(4, 100);
  CHECK(r.snapshot(50).busy_ports == (1u << 4));
  CHECK(r.snapshot(100).busy_ports == 0);
}

TEST_CASE("head of queue: empty network routes minimally without an IDN") {
  RouterParams params;
  RouterNode r(0, Coord{0, 0, 0}, k8, params);
  Packet p = make_packet(Coord{0, 0, 0}, Coord{2, 3, 1});
  ForwardAction a = r.on_head_of_queue(p, QueuePosition::injection_queue(), 0);
  CHECK(a.decided);
  CHECK(p.routed);
  CHECK_FALSE(p.has_idn());
  CHECK(p.phase == Phase::kToDest);
  REQUIRE(a.kind == ForwardAction::Kind::kForward);
  CHECK(a.out.vc == VcClass::kAdaptive);
  CHECK(minimal_next_hops(p.src, p.dst, k8).contains(a.out.link));
  // The decision is taken once.
  a = r.on_head_of_queue(p, QueuePosition::injection_queue(), 0);
  CHECK_FALSE(a.decided);
}

TEST_CASE("head of queue: congested minimal ports select an IDN") {
  RouterParams params;
  RouterNode r(0, Coord{0, 0, 0}, k8, params);
  Packet p = make_packet(Coord{0, 0, 0}, Coord{3, 3, 3});
  for (int port : {0, 2, 4}) fill(r, port, VcClass::kAdaptive, 8);
  ForwardAction a = r.on_head_of_queue(p, QueuePosition::injection_queue(), 0);
  REQUIRE(p.has_idn());
  CHECK(p.phase == Phase::kToIdn);
  CHECK(escape_class_for(p) == VcClass::kEscapeVs1);
  REQUIRE(a.kind == ForwardAction::Kind::kForward);
  CHECK(minimal_next_hops(r.coord(), p.idn, k8).contains(a.out.link));

  // POR only offers wraparound IDNs.
  params.policy = Policy::kPor;
  params.eta = Rational(1);
  RouterNode por(0, Coord{0, 0, 0}, k8, params);
  for (int port : {0, 2, 4}) fill(por, port, VcClass::kAdaptive, 8);
  Packet q = make_packet(Coord{0, 0, 0}, Coord{3, 3, 3});
  por.on_head_of_queue(q, QueuePosition::injection_queue(), 0);
  REQUIRE(q.has_idn());
  CHECK(q.idn_kind.type == IdnType::kWidn);

  // ABR never derouted.
  params.policy = Policy::kAbr;
  RouterNode abr(0, Coord{0, 0, 0}, k8, params);
  for (int port : {0, 2, 4}) fill(abr, port, VcClass::kAdaptive, 8);
  Packet b = make_packet(Coord{0, 0, 0}, Coord{3, 3, 3});
  a = abr.on_head_of_queue(b, QueuePosition::injection_queue(), 0);
  CHECK_FALSE(b.has_idn());
  REQUIRE(a.kind == ForwardAction::Kind::kForward);
  CHECK(a.out.vc == VcClass::kEscapeVs2);
  CHECK(a.out.link == LinkDir{0, Sign::kPlus});
}

TEST_CASE("head of queue: arrival at the IDN switches phase once") {
  const Coord here{3, 3, 3};
  RouterNode r(k8.index_of(here), here, k8, RouterParams{});
  Packet p = make_packet(Coord{0, 0, 0}, Coord{5, 3, 3});
  p.routed = true;
  p.idn = here;
  p.idn_kind.type = IdnType::kOidn;
  p.phase = Phase::kToIdn;
  // Adaptive full toward t: the escape VS2 transfer is an injection.
  fill(r, 0, VcClass::kAdaptive, 8);
  fill(r, 0, VcClass::kEscapeVs2, 6);
  ForwardAction a =
      r.on_head_of_queue(p, QueuePosition::input(0, VcClass::kEscapeVs1), 0);
  CHECK(a.phase_switched);
  CHECK(p.phase == Phase::kToDest);
  CHECK(p.phase_switches == 1);
  REQUIRE(a.kind == ForwardAction::Kind::kForward);
  CHECK(a.out.vc == VcClass::kEscapeVs2);
  CHECK(a.out.insertion == InsertionKind::kInjection);

  // Second look at the same node does not switch again.
  a = r.on_head_of_queue(p, QueuePosition::input(0, VcClass::kEscapeVs1), 0);
  CHECK_FALSE(a.phase_switched);
  CHECK(p.phase_switches == 1);

  // With one free VS2 slot the injection is refused.
  Packet p2 = p;
  p2.phase = Phase::kToIdn;
  p2.phase_switches = 0;
  r.credit_update(0, VcClass::kEscapeVs2, CreditEvent::kSent);
  a = r.on_head_of_queue(p2, QueuePosition::input(0, VcClass::kEscapeVs1), 0);
  CHECK(a.phase_switched);
  CHECK(a.kind == ForwardAction::Kind::kHold);
}

TEST_CASE("head of queue: delivery at the destination") {
  const Coord here{1, 1, 1};
  RouterNode r(k8.index_of(here), here, k8, RouterParams{});
  Packet p = make_packet(Coord{0, 0, 0}, here);
  p.routed = true;
  CHECK(r.on_head_of_queue(p, QueuePosition::input(0, VcClass::kAdaptive), 0).kind ==
        ForwardAction::Kind::kDeliver);
  r.occupy_sink(10);
  CHECK(r.on_head_of_queue(p, QueuePosition::input(0, VcClass::kAdaptive), 5).kind ==
        ForwardAction::Kind::kHold);
  // A packet still heading for its IDN is not delivered at t.
  Packet q = make_packet(Coord{0, 0, 0}, here);
  q.routed = true;
  q.phase = Phase::kToIdn;
  q.idn = Coord{4, 4, 4};
  q.idn_kind.type = IdnType::kWidn;
  CHECK(r.on_head_of_queue(q, QueuePosition::input(0, VcClass::kAdaptive), 20).kind ==
        ForwardAction::Kind::kForward);
}
