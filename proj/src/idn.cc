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
#include "torsim/idn.h"

#include <stdexcept>

namespace torsim {

namespace {

int mod(int a, int k) { return ((a % k) + k) % k; }

int floor_div2(int a) { return a >= 0 ? a / 2 : -((1 - a) / 2); }

void push_if_distinct(std::vector<IdnCandidate>& out, const Coord& s,
                      const Coord& t, const Coord& q, const IdnKind& kind,
                      int direct, const TorusShape& shape) {
  if (q == s || q == t) return;
  IdnCandidate c;
  c.q = q;
  c.kind = kind;
  c.total_dist = torus_distance(s, q, shape) + torus_distance(q, t, shape);
  c.dilation = c.total_dist - direct;
  out.push_back(c);
}

}  // namespace

std::string to_string(Policy p) {
  switch (p) {
    case Policy::kAbr: return "abr";
    case Policy::kPor: return "por";
    case Policy::kOfr: return "ofr";
  }
  return "?";
}

Policy parse_policy(const std::string& name) {
  if (name == "abr") return Policy::kAbr;
  if (name == "por") return Policy::kPor;
  if (name == "ofr") return Policy::kOfr;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string to_string(IdnType t) {
  switch (t) {
    case IdnType::kNone: return "none";
    case IdnType::kWidn: return "widn";
    case IdnType::kOidn: return "oidn";
  }
  return "?";
}

std::string IdnKind::to_string() const {
  std::string out = torsim::to_string(type);
  if (type == IdnType::kNone) return out;
  out += '(';
  for (int i = 0; i < n; ++i) {
    if (i) out += ',';
    out += std::to_string(params[i]);
  }
  out += ')';
  return out;
}

Coord widn(const Coord& s, const Coord& t, std::span<const int> beta,
           const TorusShape& shape) {
  TORSIM_EXPECTS(shape.contains(s) && shape.contains(t),
                 "coordinate out of bounds");
  TORSIM_EXPECTS(static_cast<int>(beta.size()) == shape.dims(),
                 "beta length must equal the torus rank");
  Coord q(shape.dims());
  for (int i = 0; i < shape.dims(); ++i) {
    TORSIM_EXPECTS(beta[i] == 0 || beta[i] == 1, "beta must be binary");
    int k = shape.radix(i);
    q[i] = ((s[i] + t[i] + beta[i] * k) / 2) % k;
  }
  return q;
}

Coord oidn(const Coord& s, const Coord& t, std::span<const int> lambda,
           int delta, const TorusShape& shape) {
  TORSIM_EXPECTS(static_cast<int>(lambda.size()) == shape.dims(),
                 "lambda length must equal the torus rank");
  TORSIM_EXPECTS(delta >= 1, "outflank offset must be positive");
  LinkClassification cls = classify_links(s, t, shape);
  bool derouted = false;
  for (int l : lambda) {
    TORSIM_EXPECTS(l >= -1 && l <= 1, "lambda entries must be in {-1,0,1}");
    derouted |= l != 0;
  }
  if (!derouted) {
    throw std::invalid_argument("all-zero lambda does not define an OIDN");
  }
  Coord q(shape.dims());
  for (int i = 0; i < shape.dims(); ++i) {
    int k = shape.radix(i);
    int l = lambda[i];
    if (cls.dim_class[i] == DimClass::kNuNu) {
      q[i] = mod(s[i] + l * delta, k);
      continue;
    }
    if (l == 0) {
      // floor((s_i + t_i) / 2) with t_i unwrapped along the minimal arc.
      int t_unwrapped = s[i] + ring_offset(s[i], t[i], k);
      q[i] = mod(floor_div2(s[i] + t_unwrapped), k);
      continue;
    }
    Sign sign = l > 0 ? Sign::kPlus : Sign::kMinus;
    int anchor = cls.of({i, sign}) == LinkKind::kNu ? s[i] : t[i];
    q[i] = mod(anchor + l * delta, k);
  }
  return q;
}

int dilation(const Coord& s, const Coord& q, const Coord& t,
             const TorusShape& shape) {
  return torus_distance(s, q, shape) + torus_distance(q, t, shape) -
         torus_distance(s, t, shape);
}

std::array<int, kMaxDims> minimal_beta(const Coord& s, const Coord& t,
                                       const TorusShape& shape) {
  std::array<int, kMaxDims> beta{};
  for (int i = 0; i < shape.dims(); ++i) {
    int diff = s[i] > t[i] ? s[i] - t[i] : t[i] - s[i];
    beta[i] = 2 * diff > shape.radix(i) ? 1 : 0;
  }
  return beta;
}

std::vector<std::array<int, 3>> oidn_lambdas_3d(int differing_dims) {
  switch (differing_dims) {
    case 3:  // not coplanar
      return {{0, -1, 1}, {0, 1, -1}, {-1, 0, 1},
              {1, 0, -1}, {-1, 1, 0}, {1, -1, 0}};
    case 2:  // coplanar, first dimension equal
      return {{0, -1, 1}, {0, 1, -1}, {1, 0, 0}, {-1, 0, 0}};
    case 1:  // collinear, first two dimensions equal
      return {{1, 0, 1}, {-1, 0, 0}, {0, 1, -1}, {0, -1, 0}};
    default:
      return {};
  }
}

std::vector<std::array<int, 2>> oidn_lambdas_2d(int differing_dims) {
  switch (differing_dims) {
    case 2:
      return {{1, -1}, {-1, 1}};
    case 1:  // collinear, differing dimension first; reduced cover
      return {{-1, 1}, {0, 1}, {0, -1}, {1, -1}};
    default:
      return {};
  }
}

std::vector<IdnCandidate> candidate_set(const Coord& s, const Coord& t,
                                        Policy policy, int delta,
                                        const TorusShape& shape) {
  std::vector<IdnCandidate> out;
  if (policy == Policy::kAbr || s == t) return out;
  const int n = shape.dims();
  const int direct = torus_distance(s, t, shape);

  if (policy == Policy::kOfr) {
    if (n != 2 && n != 3) {
      throw std::invalid_argument(
          "outflank IDN sets are defined for 2D and 3D tori only");
    }
    LinkClassification cls = classify_links(s, t, shape);
    std::array<int, kMaxDims> perm{};  // canonical position -> real dim
    int differing = 0;
    int pos = 0;
    // 3D lists put equal dimensions first, the 2D collinear list puts the
    // differing dimension first.
    bool equal_first = n == 3;
    for (int pass = 0; pass < 2; ++pass) {
      bool want_equal = (pass == 0) == equal_first;
      for (int i = 0; i < n; ++i) {
        bool equal = cls.dim_class[i] == DimClass::kNuNu;
        if (equal == want_equal) perm[pos++] = i;
        if (pass == 0 && !equal) ++differing;
      }
    }
    // Mirror lambda where the minimal link points in the negative direction.
    std::array<int, kMaxDims> orient{};
    for (int i = 0; i < n; ++i) {
      orient[i] = (cls.dim_class[i] == DimClass::kMuNu &&
                   cls.of({i, Sign::kPlus}) == LinkKind::kNu)
                      ? -1
                      : 1;
    }
    auto emit = [&](std::span<const int> canonical) {
      std::array<int, kMaxDims> lambda{};
      for (int j = 0; j < n; ++j) {
        lambda[perm[j]] = canonical[j] * orient[perm[j]];
      }
      std::span<const int> real(lambda.data(), n);
      IdnKind kind{IdnType::kOidn, n, {}};
      for (int i = 0; i < n; ++i) kind.params[i] = static_cast<std::int8_t>(lambda[i]);
      push_if_distinct(out, s, t, oidn(s, t, real, delta, shape), kind,
                       direct, shape);
    };
    if (n == 3) {
      for (const auto& l : oidn_lambdas_3d(differing)) emit(l);
    } else {
      for (const auto& l : oidn_lambdas_2d(differing)) emit(l);
    }
  }

  std::array<int, kMaxDims> min_beta = minimal_beta(s, t, shape);
  for (unsigned bits = 0; bits < (1u << n); ++bits) {
    std::array<int, kMaxDims> beta{};
    bool minimal = true;
    for (int i = 0; i < n; ++i) {
      beta[i] = static_cast<int>((bits >> i) & 1u);
      minimal &= beta[i] == min_beta[i];
    }
    if (minimal) continue;
    IdnKind kind{IdnType::kWidn, n, {}};
    for (int i = 0; i < n; ++i) kind.params[i] = static_cast<std::int8_t>(beta[i]);
    push_if_distinct(out, s, t,
                     widn(s, t, std::span<const int>(beta.data(), n), shape),
                     kind, direct, shape);
  }
  return out;
}

}  // namespace torsim
