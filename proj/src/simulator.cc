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
#include "torsim/simulator.h"

#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <sstream>

namespace torsim {

Rational SimConfig::effective_eta() const {
  if (eta) return *eta;
  return policy == Policy::kPor ? Rational(1) : Rational(2);
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  try {
    TorusShape shape(dims);
    TrafficPattern pat(pattern, shape);
    if (policy == Policy::kOfr && shape.dims() != 2 && shape.dims() != 3) {
      fail("ofr needs a 2D or 3D torus");
    }
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma must be >= 0");
  if (packet_bytes <= 0) fail("packet size must be positive");
  if (capacity < 2) fail("queue capacity must be at least 2");
  if (message_packets < 1) fail("message size must be at least 1");
  if (lat_int_ns <= 0 || lat_ext_ns <= 0) fail("latencies must be positive");
  if (!(bw_int_gbps > 0) || !(bw_ext_gbps > 0)) fail("bandwidths must be positive");
  if (delta < 1) fail("delta must be at least 1");
  if (effective_eta() < Rational(0)) fail("eta must be non-negative");
  if (warmup_ns < 0 || measure_ns <= 0) fail("warmup >= 0 and measure > 0 required");
  if (subwindows < 1) fail("need at least one sub-window");
  if (!(feed_rate > 0)) fail("feed rate must be positive");
  if (!(jitter >= 0 && jitter < 1)) fail("jitter must be in [0,1)");
  if (drain_ns < 0) fail("drain must be >= 0");
  gamma0_rate(*this);
}

double gamma0_rate(const SimConfig& cfg) {
  TorusShape shape(cfg.dims);
  int k = shape.max_radix();
  if (k % 2 != 0) {
    throw ConfigError("bisection of " + shape.to_string() +
                      " is not an even cut; gamma0 is undefined");
  }
  double link_pkts_per_s = cfg.bw_ext_gbps * 1e9 / (8.0 * cfg.packet_bytes);
  return 8.0 * link_pkts_per_s / k;
}

namespace {

SimTime ceil_ns(double bits, double gbps) {
  // bits / (gbps bits/ns), rounded up; the epsilon absorbs representation
  // error on exact quotients.
  return static_cast<SimTime>(std::ceil(bits / gbps - 1e-9));
}

}  // namespace

LinkTiming link_timing(const SimConfig& cfg) {
  LinkTiming t;
  double bits = 8.0 * cfg.packet_bytes;
  t.ser_int = ceil_ns(bits, cfg.bw_int_gbps);
  t.ser_ext = ceil_ns(bits, cfg.bw_ext_gbps);
  double rate = gamma0_rate(cfg);
  SimTime feed = static_cast<SimTime>(std::ceil(1e9 / (cfg.feed_rate * rate) - 1e-9));
  t.feed_interval = std::max(feed, t.ser_int);
  t.message_interval =
      cfg.gamma > 0 ? cfg.message_packets * 1e9 / (cfg.gamma * rate) : 0.0;
  return t;
}

SimTime empty_network_latency(const SimConfig& cfg, int hops) {
  LinkTiming t = link_timing(cfg);
  return 2 * (cfg.lat_int_ns + t.ser_int) + hops * (cfg.lat_ext_ns + t.ser_ext);
}

namespace {

enum class EventType : std::uint8_t {
  kGenerate,
  kFeed,
  kInjectArrive,
  kLinkArrive,
  kCreditReturn,
  kEvaluate,
  kConsume,
  kProbe,
};

struct Event {
  SimTime t;
  std::uint64_t seq;
  EventType type;
  std::uint8_t vc;
  std::int16_t port;
  std::int32_t node;
  PacketId pkt;

  bool operator>(const Event& o) const {
    return t != o.t ? t > o.t : seq > o.seq;
  }
};

struct Message {
  int dst;
  SimTime created;
  int remaining;
};

struct Generator {
  std::deque<Message> backlog;
  std::uint64_t message_index = 0;
  int credits = 0;  // free slots in the router's injection queue
  int in_flight = 0;
  SimTime ready_at = 0;
  bool feed_scheduled = false;
};

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

class Simulation {
 public:
  Simulation(const SimConfig& cfg, const RecordSink& sink)
      : cfg_(cfg),
        shape_(cfg.dims),
        pattern_(cfg.pattern, shape_),
        timing_(link_timing(cfg)),
        rng_(cfg.seed),
        sink_(sink) {
    pattern_.verify_bijection();
    RouterParams params;
    params.policy = cfg.policy;
    params.capacity = cfg.capacity;
    params.delta = cfg.delta;
    params.eta = cfg.effective_eta();
    params.vs1_enabled = !(cfg.policy == Policy::kAbr && cfg.abr_two_vcs);
    const int n_nodes = shape_.num_nodes();
    const int ports = shape_.num_ports();
    nodes_.reserve(static_cast<std::size_t>(n_nodes));
    coords_.reserve(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) {
      coords_.push_back(shape_.coord_of(i));
      nodes_.emplace_back(i, coords_.back(), shape_, params);
    }
    neighbor_.resize(static_cast<std::size_t>(n_nodes * ports));
    for (int i = 0; i < n_nodes; ++i) {
      for (int p = 0; p < ports; ++p) {
        neighbor_[i * ports + p] =
            shape_.index_of(shape_.neighbor(coords_[i], LinkDir::from_port(p)));
      }
    }
    const std::size_t slots = static_cast<std::size_t>(n_nodes * ports * kNumVcClasses);
    link_in_flight_.assign(slots, 0);
    credit_in_flight_.assign(slots, 0);
    gens_.resize(static_cast<std::size_t>(n_nodes));
    for (auto& g : gens_) g.credits = cfg.capacity;
    eval_at_.assign(static_cast<std::size_t>(n_nodes), -1);
    watchdog_ns_ = 10 * (timing_.ser_ext + cfg.lat_ext_ns);
    measure_begin_ = cfg.warmup_ns;
    measure_end_ = cfg.warmup_ns + cfg.measure_ns;
    result_.config = cfg;
    result_.windows.assign(static_cast<std::size_t>(cfg.subwindows), WindowStat{});
  }

  RunResult execute() {
    if (cfg_.gamma > 0) {
      std::uniform_real_distribution<double> phase(0.0, timing_.message_interval);
      for (int i = 0; i < shape_.num_nodes(); ++i) {
        SimTime t0 = static_cast<SimTime>(phase(rng_));
        if (t0 < measure_end_) push({t0, 0, EventType::kGenerate, 0, 0, i, -1});
      }
    }
    for (int w = 0; w <= cfg_.subwindows; ++w) {
      SimTime t = measure_begin_ + cfg_.measure_ns * w / cfg_.subwindows;
      push({t, 0, EventType::kProbe, 0, 0, w, -1});
    }
    const SimTime hard_end = measure_end_ + cfg_.drain_ns;
    std::uint64_t hash = kFnvOffset;
    while (!events_.empty()) {
      Event ev = events_.top();
      if (ev.t > hard_end) break;
      if (draining_ && network_empty()) break;
      events_.pop();
      now_ = ev.t;
      ++result_.stats.events;
      hash = mix(hash, static_cast<std::uint64_t>(ev.t));
      hash = mix(hash, (static_cast<std::uint64_t>(ev.type) << 40) ^
                           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ev.node)) << 8) ^
                           static_cast<std::uint64_t>(ev.port));
      check_watchdog();
      dispatch(ev);
      if (cfg_.audit_every > 0 && result_.stats.events % cfg_.audit_every == 0) {
        audit();
      }
    }
    if (in_router_ > 0 && end_time() - last_move_ > watchdog_ns_) {
      ++result_.stats.watchdog_stalls;
    }
    result_.stats.trace_hash = hash;
    result_.stats.drained = draining_ && network_empty();
    result_.stats.end_time = end_time();
    if (cfg_.audit_every > 0) audit();
    return std::move(result_);
  }

 private:
  static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    h ^= v;
    h *= kFnvPrime;
    return h ^ (h >> 29);
  }

  SimTime end_time() const { return now_; }

  void push(Event ev) {
    ev.seq = seq_++;
    events_.push(ev);
    if (static_cast<std::int64_t>(events_.size()) > cfg_.max_events_queued) {
      throw SimulationError("event queue overflow at t=" + std::to_string(now_) +
                            "ns\n" + dump_state());
    }
  }

  int slot(int node, int port, VcClass c) const {
    return (node * shape_.num_ports() + port) * kNumVcClasses + vc_index(c);
  }

  void schedule_eval(int node, SimTime t) {
    if (eval_at_[node] == t) return;
    eval_at_[node] = t;
    push({t, 0, EventType::kEvaluate, 0, 0, node, -1});
  }

  void check_watchdog() {
    if (in_router_ > 0 && now_ - last_move_ > watchdog_ns_) {
      ++result_.stats.watchdog_stalls;
      last_move_ = now_;
    }
  }

  void dispatch(const Event& ev) {
    switch (ev.type) {
      case EventType::kGenerate: on_generate(ev.node); break;
      case EventType::kFeed:
        gens_[ev.node].feed_scheduled = false;
        try_feed(ev.node);
        break;
      case EventType::kInjectArrive: {
        nodes_[ev.node].injection().push(ev.pkt);
        --gens_[ev.node].in_flight;
        --feed_in_flight_;
        ++in_router_;
        last_move_ = now_;
        schedule_eval(ev.node, now_);
        break;
      }
      case EventType::kLinkArrive: {
        auto c = static_cast<VcClass>(ev.vc);
        nodes_[ev.node].input(ev.port, c).push(ev.pkt);
        --link_in_flight_[slot(ev.node, ev.port, c)];
        last_move_ = now_;
        schedule_eval(ev.node, now_);
        break;
      }
      case EventType::kCreditReturn: {
        // ev.node is the upstream router; the credit belongs to the input
        // queue of its neighbour across ev.port.
        auto c = static_cast<VcClass>(ev.vc);
        nodes_[ev.node].credit_update(ev.port, c, CreditEvent::kReturned);
        int down = neighbor_[ev.node * shape_.num_ports() + ev.port];
        --credit_in_flight_[slot(down, ev.port, c)];
        schedule_eval(ev.node, now_);
        break;
      }
      case EventType::kEvaluate:
        if (eval_at_[ev.node] == now_) eval_at_[ev.node] = -1;
        evaluate(ev.node);
        break;
      case EventType::kConsume: on_consume(ev.pkt); break;
      case EventType::kProbe: on_probe(ev.node); break;
    }
  }

  void on_generate(int node) {
    Generator& g = gens_[node];
    int dst = pattern_.destination(node, g.message_index++, rng_);
    if (dst == node) {
      ++result_.stats.self_messages;
    } else {
      g.backlog.push_back({dst, now_, cfg_.message_packets});
      backlog_ += cfg_.message_packets;
      result_.stats.generated += cfg_.message_packets;
      try_feed(node);
    }
    std::uniform_real_distribution<double> spread(1.0 - cfg_.jitter, 1.0 + cfg_.jitter);
    SimTime next = now_ + std::max<SimTime>(
        1, static_cast<SimTime>(std::llround(timing_.message_interval * spread(rng_))));
    if (next < measure_end_) push({next, 0, EventType::kGenerate, 0, 0, node, -1});
  }

  void try_feed(int node) {
    Generator& g = gens_[node];
    if (draining_ || g.backlog.empty() || g.credits == 0) return;
    if (g.ready_at > now_) {
      if (!g.feed_scheduled) {
        g.feed_scheduled = true;
        push({g.ready_at, 0, EventType::kFeed, 0, 0, node, -1});
      }
      return;
    }
    Message& m = g.backlog.front();
    PacketId pid = allocate_packet();
    Packet& p = packets_[pid];
    p.id = next_packet_id_++;
    p.src = coords_[node];
    p.dst = coords_[m.dst];
    p.created_at = m.created;
    if (--m.remaining == 0) g.backlog.pop_front();
    --backlog_;
    --g.credits;
    ++g.in_flight;
    ++feed_in_flight_;
    g.ready_at = now_ + timing_.feed_interval;
    push({now_ + cfg_.lat_int_ns + timing_.ser_int, 0, EventType::kInjectArrive, 0, 0,
          node, pid});
    if (!g.backlog.empty() && g.credits > 0 && !g.feed_scheduled) {
      g.feed_scheduled = true;
      push({g.ready_at, 0, EventType::kFeed, 0, 0, node, -1});
    }
  }

  PacketId allocate_packet() {
    if (!free_packets_.empty()) {
      PacketId id = free_packets_.back();
      free_packets_.pop_back();
      packets_[id] = Packet{};
      return id;
    }
    packets_.emplace_back();
    return static_cast<PacketId>(packets_.size() - 1);
  }

  void evaluate(int u) {
    RouterNode& node = nodes_[u];
    const int nq = node.num_queues();
    const int ports = shape_.num_ports();
    bool progress = true;
    while (progress) {
      progress = false;
      for (int j = 0; j < nq; ++j) {
        int q = (node.round_robin() + j) % nq;
        VirtualChannel& vc = node.queue(q);
        if (vc.empty()) continue;
        PacketId pid = vc.front();
        Packet& p = packets_[pid];
        QueuePosition pos = node.position(q);
        ForwardAction act = node.on_head_of_queue(p, pos, now_);
        if (act.decided && p.has_idn()) ++result_.stats.derouted_decisions;
        if (act.kind == ForwardAction::Kind::kHold) continue;

        vc.pop();
        SimTime ser_out =
            act.kind == ForwardAction::Kind::kDeliver ? timing_.ser_int : timing_.ser_ext;
        if (pos.injection) {
          ++gens_[u].credits;
        } else {
          // The upstream router sits one hop against the direction of travel.
          LinkDir in = LinkDir::from_port(pos.port);
          int upstream = neighbor_[u * ports + LinkDir{in.dim, opposite(in.sign)}.port()];
          ++credit_in_flight_[slot(u, pos.port, pos.vc)];
          push({now_ + ser_out + cfg_.lat_ext_ns, 0, EventType::kCreditReturn,
                static_cast<std::uint8_t>(pos.vc), static_cast<std::int16_t>(pos.port),
                upstream, -1});
        }

        if (act.kind == ForwardAction::Kind::kDeliver) {
          node.occupy_sink(now_ + timing_.ser_int);
          --in_router_;
          ++sink_in_flight_;
          push({now_ + timing_.ser_int + cfg_.lat_int_ns, 0, EventType::kConsume, 0, 0,
                u, pid});
          schedule_eval(u, now_ + timing_.ser_int);
        } else {
          int port = act.out.link.port();
          node.credit_update(port, act.out.vc, CreditEvent::kSent);
          node.occupy_link(port, now_ + timing_.ser_ext);
          ++p.hops;
          int v = neighbor_[u * ports + port];
          ++link_in_flight_[slot(v, port, act.out.vc)];
          push({now_ + timing_.ser_ext + cfg_.lat_ext_ns, 0, EventType::kLinkArrive,
                static_cast<std::uint8_t>(act.out.vc), static_cast<std::int16_t>(port), v,
                pid});
          schedule_eval(u, now_ + timing_.ser_ext);
        }
        last_move_ = now_;
        node.set_round_robin((q + 1) % nq);
        progress = true;
        // May grow the packet pool, so `p` is dead past this point.
        if (pos.injection) try_feed(u);
      }
    }
  }

  void on_consume(PacketId pid) {
    Packet& p = packets_[pid];
    p.consumed_at = now_;
    --sink_in_flight_;
    ++result_.stats.consumed;
    int expected = p.has_idn() ? torus_distance(p.src, p.idn, shape_) +
                                     torus_distance(p.idn, p.dst, shape_)
                               : torus_distance(p.src, p.dst, shape_);
    if (p.hops != expected) ++result_.stats.hop_mismatches;
    if (p.consumed_at - p.created_at < empty_latency(p.hops)) {
      ++result_.stats.timing_violations;
    }
    result_.stats.max_phase_switches =
        std::max(result_.stats.max_phase_switches, p.phase_switches);

    PacketRecord rec;
    rec.id = p.id;
    rec.src = shape_.index_of(p.src);
    rec.dst = shape_.index_of(p.dst);
    rec.idn = p.has_idn() ? shape_.index_of(p.idn) : -1;
    rec.kind = p.idn_kind.type;
    rec.hops = p.hops;
    rec.phase_switches = p.phase_switches;
    rec.created_at = p.created_at;
    rec.consumed_at = p.consumed_at;

    if (now_ >= measure_begin_ && now_ < measure_end_) {
      MeasureStats& m = result_.measure;
      ++m.consumed;
      double life = static_cast<double>(rec.lifetime());
      m.lifetime_sum += life;
      m.hops_sum += rec.hops;
      if (rec.kind == IdnType::kWidn) ++m.widn;
      if (rec.kind == IdnType::kOidn) ++m.oidn;
      m.lifetimes.push_back(rec.lifetime());
      auto w = static_cast<std::size_t>((now_ - measure_begin_) * cfg_.subwindows /
                                        cfg_.measure_ns);
      result_.windows[w].consumed += 1;
      result_.windows[w].lifetime_sum += life;
      if (cfg_.keep_records) result_.records.push_back(rec);
      if (sink_) sink_(rec);
    }
    free_packets_.push_back(pid);
  }

  bool network_empty() const {
    return in_router_ == 0 && feed_in_flight_ == 0 && sink_in_flight_ == 0;
  }

  SimTime empty_latency(int hops) const {
    return 2 * (cfg_.lat_int_ns + timing_.ser_int) +
           hops * (cfg_.lat_ext_ns + timing_.ser_ext);
  }

  std::int64_t count_resident() const {
    std::int64_t n = backlog_ + feed_in_flight_ + sink_in_flight_;
    for (const RouterNode& node : nodes_) {
      for (int q = 0; q < node.num_queues(); ++q) n += node.queue(q).size();
    }
    for (int c : link_in_flight_) n += c;
    return n;
  }

  void on_probe(int index) {
    ProbeSample s;
    s.time = now_;
    s.generated = result_.stats.generated;
    s.consumed = result_.stats.consumed;
    s.resident = count_resident();
    s.backlog = backlog_;
    s.in_router = in_router_;
    if (s.generated != s.consumed + s.resident) ++result_.stats.conservation_failures;
    result_.probes.push_back(s);
    if (index == cfg_.subwindows && cfg_.drain_ns > 0) draining_ = true;
  }

  void audit() {
    ++result_.stats.audits;
    const int ports = shape_.num_ports();
    std::ostringstream err;
    for (int v = 0; v < shape_.num_nodes(); ++v) {
      for (int p = 0; p < ports; ++p) {
        LinkDir in = LinkDir::from_port(p);
        int up = neighbor_[v * ports + LinkDir{in.dim, opposite(in.sign)}.port()];
        for (int c = 0; c < kNumVcClasses; ++c) {
          auto cls = static_cast<VcClass>(c);
          const VirtualChannel& q = nodes_[v].input(p, cls);
          int total = nodes_[up].credits(p, cls) + q.size() +
                      link_in_flight_[slot(v, p, cls)] + credit_in_flight_[slot(v, p, cls)];
          if (total != q.capacity() || q.size() > q.capacity()) {
            err << "credit audit: node " << v << " port " << p << " vc " << c
                << " sums to " << total << '\n';
          }
        }
      }
      const Generator& g = gens_[v];
      if (g.credits + nodes_[v].injection().size() + g.in_flight != cfg_.capacity) {
        err << "injection audit: node " << v << '\n';
      }
    }
    // Each escape ring (fixed dimension, orientation, class and the other
    // coordinates) must keep at least one physically free slot.
    for (int c = vc_index(VcClass::kEscapeVs1); c < kNumVcClasses; ++c) {
      auto cls = static_cast<VcClass>(c);
      for (int p = 0; p < ports; ++p) {
        int dim = p / 2;
        for (int start = 0; start < shape_.num_nodes(); ++start) {
          if (coords_[start][dim] != 0) continue;
          int occupied = 0;
          int capacity = 0;
          int v = start;
          for (int step = 0; step < shape_.radix(dim); ++step) {
            const VirtualChannel& q = nodes_[v].input(p, cls);
            occupied += q.size() + link_in_flight_[slot(v, p, cls)];
            capacity += q.capacity();
            v = neighbor_[v * ports + p];
          }
          if (capacity > 0 && occupied >= capacity) {
            err << "bubble audit: ring through node " << start << " port " << p
                << " class " << c << " is full\n";
          }
        }
      }
    }
    if (result_.stats.generated != result_.stats.consumed + count_resident()) {
      err << "conservation audit failed\n";
    }
    std::string msg = err.str();
    if (!msg.empty()) {
      throw SimulationError("audit failed at t=" + std::to_string(now_) + "ns\n" +
                            msg + dump_state());
    }
  }

  std::string dump_state() const {
    std::ostringstream os;
    os << "state: t=" << now_ << " events_queued=" << events_.size()
       << " generated=" << result_.stats.generated
       << " consumed=" << result_.stats.consumed << " backlog=" << backlog_
       << " in_router=" << in_router_ << " packets_allocated=" << packets_.size()
       << '\n';
    int shown = 0;
    for (const RouterNode& node : nodes_) {
      int resident = 0;
      for (int q = 0; q < node.num_queues(); ++q) resident += node.queue(q).size();
      if (resident == 0) continue;
      os << "  node " << node.id() << ' ' << node.coord().to_string() << ':';
      for (int q = 0; q < node.num_queues(); ++q) {
        if (node.queue(q).size()) os << " q" << q << '=' << node.queue(q).size();
      }
      os << '\n';
      if (++shown == 16) {
        os << "  ...\n";
        break;
      }
    }
    return os.str();
  }

  SimConfig cfg_;
  TorusShape shape_;
  TrafficPattern pattern_;
  LinkTiming timing_;
  std::mt19937_64 rng_;
  RecordSink sink_;

  std::vector<RouterNode> nodes_;
  std::vector<Coord> coords_;
  std::vector<int> neighbor_;
  std::vector<Generator> gens_;
  std::vector<Packet> packets_;
  std::vector<PacketId> free_packets_;
  std::vector<int> link_in_flight_;    // per downstream input VC
  std::vector<int> credit_in_flight_;  // per downstream input VC
  std::vector<SimTime> eval_at_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  SimTime now_ = 0;
  SimTime last_move_ = 0;
  SimTime watchdog_ns_ = 0;
  SimTime measure_begin_ = 0;
  SimTime measure_end_ = 0;
  std::uint64_t next_packet_id_ = 0;
  std::int64_t backlog_ = 0;
  std::int64_t feed_in_flight_ = 0;
  std::int64_t sink_in_flight_ = 0;
  std::int64_t in_router_ = 0;
  bool draining_ = false;

  RunResult result_;
};

}  // namespace

RunResult run(const SimConfig& cfg, const RecordSink& sink) {
  cfg.validate();
  Simulation sim(cfg, sink);
  return sim.execute();
}

}  // namespace torsim
