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
#include "torsim/topology.h"

#include <algorithm>
#include <sstream>

namespace torsim {

Coord::Coord(std::initializer_list<int> values)
    : n_(static_cast<int>(values.size())) {
  TORSIM_EXPECTS(n_ <= kMaxDims, "coordinate rank out of range");
  int i = 0;
  for (int v : values) c_[i++] = v;
}

std::string Coord::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < n_; ++i) {
    if (i) os << ',';
    os << c_[i];
  }
  os << ')';
  return os.str();
}

std::string LinkDir::to_string() const {
  return std::to_string(dim) + (sign == Sign::kPlus ? "+" : "-");
}

TorusShape::TorusShape(const std::vector<int>& radices)
    : n_(static_cast<int>(radices.size())) {
  if (n_ < 1 || n_ > kMaxDims) {
    throw std::invalid_argument("torus must have between 1 and " +
                                std::to_string(kMaxDims) + " dimensions");
  }
  long long nodes = 1;
  for (int i = 0; i < n_; ++i) {
    if (radices[i] < 3) {
      throw std::invalid_argument("every torus dimension needs length >= 3");
    }
    k_[i] = radices[i];
    nodes *= radices[i];
    if (nodes > (1 << 24)) {
      throw std::invalid_argument("torus too large");
    }
  }
  nodes_ = static_cast<int>(nodes);
}

int TorusShape::max_radix() const {
  return *std::max_element(k_.begin(), k_.begin() + n_);
}

bool TorusShape::is_cubic() const {
  return std::all_of(k_.begin(), k_.begin() + n_,
                     [&](int k) { return k == k_[0]; });
}

std::vector<int> TorusShape::radices() const {
  return {k_.begin(), k_.begin() + n_};
}

bool TorusShape::contains(const Coord& c) const {
  if (c.size() != n_) return false;
  for (int i = 0; i < n_; ++i) {
    if (c[i] < 0 || c[i] >= k_[i]) return false;
  }
  return true;
}

int TorusShape::index_of(const Coord& c) const {
  TORSIM_EXPECTS(contains(c), "coordinate out of bounds");
  int idx = 0;
  for (int i = 0; i < n_; ++i) idx = idx * k_[i] + c[i];
  return idx;
}

Coord TorusShape::coord_of(int index) const {
  TORSIM_EXPECTS(index >= 0 && index < nodes_, "node index out of bounds");
  Coord c(n_);
  for (int i = n_ - 1; i >= 0; --i) {
    c[i] = index % k_[i];
    index /= k_[i];
  }
  return c;
}

Coord TorusShape::neighbor(const Coord& c, LinkDir dir) const {
  Coord out = c;
  int k = k_[dir.dim];
  out[dir.dim] = (c[dir.dim] + sign_value(dir.sign) + k) % k;
  return out;
}

std::string TorusShape::to_string() const {
  std::string s;
  for (int i = 0; i < n_; ++i) {
    if (i) s += 'x';
    s += std::to_string(k_[i]);
  }
  return s;
}

int ring_offset(int a, int b, int k) {
  int fwd = ((b - a) % k + k) % k;
  return fwd <= k - fwd ? fwd : fwd - k;
}

int torus_distance(const Coord& s, const Coord& t, const TorusShape& shape) {
  TORSIM_EXPECTS(shape.contains(s) && shape.contains(t),
                 "coordinate out of bounds");
  int d = 0;
  for (int i = 0; i < shape.dims(); ++i) {
    d += ring_distance(s[i], t[i], shape.radix(i));
  }
  return d;
}

LinkClassification classify_links(const Coord& s, const Coord& t,
                                  const TorusShape& shape) {
  TORSIM_EXPECTS(shape.contains(s) && shape.contains(t),
                 "coordinate out of bounds");
  LinkClassification out;
  out.n = shape.dims();
  for (int i = 0; i < out.n; ++i) {
    int k = shape.radix(i);
    if (s[i] == t[i]) {
      out.dim_class[i] = DimClass::kNuNu;
      out.kind[i] = {LinkKind::kNu, LinkKind::kNu};
      continue;
    }
    out.dim_class[i] = DimClass::kMuNu;
    int fwd = ((t[i] - s[i]) % k + k) % k;
    if (2 * fwd == k) {
      out.kind[i] = {LinkKind::kMu, LinkKind::kMu};
    } else if (2 * fwd < k) {
      out.kind[i] = {LinkKind::kMu, LinkKind::kNu};
    } else {
      out.kind[i] = {LinkKind::kNu, LinkKind::kMu};
    }
  }
  return out;
}

PortSet minimal_next_hops(const Coord& c, const Coord& dest,
                          const TorusShape& shape) {
  TORSIM_EXPECTS(shape.contains(c) && shape.contains(dest),
                 "coordinate out of bounds");
  PortSet out;
  for (int i = 0; i < shape.dims(); ++i) {
    if (c[i] == dest[i]) continue;
    int k = shape.radix(i);
    int fwd = ((dest[i] - c[i]) % k + k) % k;
    if (2 * fwd <= k) out.insert({i, Sign::kPlus});
    if (2 * fwd >= k) out.insert({i, Sign::kMinus});
  }
  return out;
}

LinkDir dim_order_next_hop(const Coord& c, const Coord& dest,
                           const TorusShape& shape) {
  TORSIM_EXPECTS(shape.contains(c) && shape.contains(dest),
                 "coordinate out of bounds");
  for (int i = 0; i < shape.dims(); ++i) {
    if (c[i] == dest[i]) continue;
    int off = ring_offset(c[i], dest[i], shape.radix(i));
    return {i, off > 0 ? Sign::kPlus : Sign::kMinus};
  }
  throw ContractViolation("dim_order_next_hop called at the destination");
}

}  // namespace torsim
