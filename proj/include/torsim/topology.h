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
#ifndef TORSIM_TOPOLOGY_H_
#define TORSIM_TOPOLOGY_H_

#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace torsim {

inline constexpr int kMaxDims = 6;

// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define TORSIM_EXPECTS(cond, msg)                 \
  do {                                            \
    if (!(cond)) {                                \
      throw ::torsim::ContractViolation(msg);     \
    }                                             \
  } while (0)

// Node coordinate, one integer per dimension. Unused trailing slots are
// always zero so that defaulted equality is exact.
class Coord {
 public:
  Coord() = default;
  explicit Coord(int n) : n_(n) {
    TORSIM_EXPECTS(n >= 0 && n <= kMaxDims, "coordinate rank out of range");
  }
  Coord(std::initializer_list<int> values);

  int size() const { return n_; }
  int operator[](int i) const { return c_[i]; }
  int& operator[](int i) { return c_[i]; }

  bool operator==(const Coord&) const = default;

  std::string to_string() const;

 private:
  std::array<int, kMaxDims> c_{};
  int n_ = 0;
};

enum class Sign : std::uint8_t { kPlus, kMinus };

inline int sign_value(Sign s) { return s == Sign::kPlus ? 1 : -1; }
inline Sign opposite(Sign s) {
  return s == Sign::kPlus ? Sign::kMinus : Sign::kPlus;
}

// Outgoing link direction: a dimension and an orientation. Ports are
// numbered 2*dim for the positive link and 2*dim+1 for the negative one.
struct LinkDir {
  int dim = 0;
  Sign sign = Sign::kPlus;

  int port() const { return 2 * dim + (sign == Sign::kMinus ? 1 : 0); }
  static LinkDir from_port(int port) {
    return {port / 2, (port % 2) != 0 ? Sign::kMinus : Sign::kPlus};
  }
  bool operator==(const LinkDir&) const = default;
  std::string to_string() const;
};

// Small set of outgoing ports, stored as a bitmask indexed by LinkDir::port.
class PortSet {
 public:
  class iterator {
   public:
    explicit iterator(std::uint32_t bits) : bits_(bits) {}
    LinkDir operator*() const { return LinkDir::from_port(std::countr_zero(bits_)); }
    iterator& operator++() {
      bits_ &= bits_ - 1;
      return *this;
    }
    bool operator!=(const iterator& o) const { return bits_ != o.bits_; }
    bool operator==(const iterator& o) const { return bits_ == o.bits_; }

   private:
    std::uint32_t bits_;
  };

  PortSet() = default;
  PortSet(std::initializer_list<LinkDir> links) {
    for (const LinkDir& l : links) insert(l);
  }

  void insert(LinkDir l) { bits_ |= 1u << l.port(); }
  bool contains(LinkDir l) const { return (bits_ >> l.port()) & 1u; }
  bool contains_port(int port) const { return (bits_ >> port) & 1u; }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  std::uint32_t bits() const { return bits_; }

  iterator begin() const { return iterator(bits_); }
  iterator end() const { return iterator(0); }

  bool operator==(const PortSet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

class TorusShape {
 public:
  explicit TorusShape(const std::vector<int>& radices);

  int dims() const { return n_; }
  int radix(int dim) const { return k_[dim]; }
  int max_radix() const;
  int num_nodes() const { return nodes_; }
  int num_ports() const { return 2 * n_; }
  bool is_cubic() const;
  std::vector<int> radices() const;

  bool contains(const Coord& c) const;
  // Row-major linearization: dimension 0 is the most significant digit.
  int index_of(const Coord& c) const;
  Coord coord_of(int index) const;
  Coord neighbor(const Coord& c, LinkDir dir) const;

  // "8x8x8"
  std::string to_string() const;

  bool operator==(const TorusShape&) const = default;

 private:
  std::array<int, kMaxDims> k_{};
  int n_ = 0;
  int nodes_ = 0;
};

enum class DimClass : std::uint8_t { kMuNu, kNuNu };
enum class LinkKind : std::uint8_t { kMu, kNu };

// Minimal/non-minimal labelling of the 2n links leaving s toward t.
struct LinkClassification {
  int n = 0;
  std::array<DimClass, kMaxDims> dim_class{};
  std::array<std::array<LinkKind, 2>, kMaxDims> kind{};

  LinkKind of(LinkDir l) const {
    return kind[l.dim][l.sign == Sign::kPlus ? 0 : 1];
  }
};

// Shortest distance between a and b on a ring of length k.
inline int ring_distance(int a, int b, int k) {
  int d = a > b ? a - b : b - a;
  return d < k - d ? d : k - d;
}

// Signed displacement of the shortest path a -> b on a ring, positive on
// the even-k midpoint tie.
int ring_offset(int a, int b, int k);

int torus_distance(const Coord& s, const Coord& t, const TorusShape& shape);

LinkClassification classify_links(const Coord& s, const Coord& t,
                                  const TorusShape& shape);

// Every outgoing link of c that lies on some shortest path to dest. On the
// even-k midpoint tie both orientations are returned. Empty when c == dest.
PortSet minimal_next_hops(const Coord& c, const Coord& dest,
                          const TorusShape& shape);

// Escape-network route: minimal direction of the lowest unresolved
// dimension, positive on the midpoint tie.
LinkDir dim_order_next_hop(const Coord& c, const Coord& dest,
                           const TorusShape& shape);

}  // namespace torsim

#endif  // TORSIM_TOPOLOGY_H_
