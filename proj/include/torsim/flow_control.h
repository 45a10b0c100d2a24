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
#ifndef TORSIM_FLOW_CONTROL_H_
#define TORSIM_FLOW_CONTROL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "torsim/topology.h"

namespace torsim {

enum class VcClass : std::uint8_t { kAdaptive = 0, kEscapeVs1 = 1, kEscapeVs2 = 2 };
inline constexpr int kNumVcClasses = 3;

inline int vc_index(VcClass c) { return static_cast<int>(c); }
inline bool is_escape(VcClass c) { return c != VcClass::kAdaptive; }
std::string to_string(VcClass c);

// Progress: a packet continuing inside the same escape ring (same escape
// class, dimension and orientation). Everything else entering an escape
// queue counts as an injection.
enum class InsertionKind : std::uint8_t { kProgress, kInjection };

// Bubble rule. Adaptive queues accept with one free slot; escape queues need
// one for progress and two for injection.
inline bool admit(int free_slots, VcClass cls, InsertionKind kind) {
  if (!is_escape(cls)) return free_slots >= 1;
  return free_slots >= (kind == InsertionKind::kInjection ? 2 : 1);
}

using PacketId = std::int32_t;

// Bounded FIFO of packet handles.
class VirtualChannel {
 public:
  VirtualChannel() = default;
  VirtualChannel(VcClass cls, int capacity)
      : cls_(cls), slots_(static_cast<std::size_t>(capacity)) {}

  VcClass vc_class() const { return cls_; }
  int capacity() const { return static_cast<int>(slots_.size()); }
  int size() const { return size_; }
  int free_slots() const { return capacity() - size_; }
  bool empty() const { return size_ == 0; }

  PacketId front() const {
    TORSIM_EXPECTS(size_ > 0, "front() on empty virtual channel");
    return slots_[head_];
  }

  void push(PacketId p) {
    TORSIM_EXPECTS(size_ < capacity(), "virtual channel overfill");
    slots_[(head_ + size_) % slots_.size()] = p;
    ++size_;
  }

  PacketId pop() {
    PacketId p = front();
    head_ = (head_ + 1) % static_cast<int>(slots_.size());
    --size_;
    return p;
  }

  // i-th queued packet from the head.
  PacketId at(int i) const { return slots_[(head_ + i) % slots_.size()]; }

  bool admits(InsertionKind kind) const { return admit(free_slots(), cls_, kind); }

 private:
  VcClass cls_ = VcClass::kAdaptive;
  std::vector<PacketId> slots_;
  int head_ = 0;
  int size_ = 0;
};

}  // namespace torsim

#endif  // TORSIM_FLOW_CONTROL_H_
