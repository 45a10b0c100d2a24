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
#include "oracles.h"

#include <algorithm>
#include <limits>
#include <queue>
#include <utility>

namespace oracle {

TorusGraph::TorusGraph(std::vector<int> radices) : k_(std::move(radices)) {
  int n = 1;
  for (int k : k_) n *= k;
  adj_.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    std::vector<int> c = coord(v);
    for (std::size_t d = 0; d < k_.size(); ++d) {
      for (int step : {1, -1}) {
        std::vector<int> w = c;
        w[d] = (w[d] + step + k_[d]) % k_[d];
        adj_[v].push_back(index(w));
      }
    }
  }
}

int TorusGraph::index(const std::vector<int>& coord) const {
  int idx = 0;
  for (std::size_t d = 0; d < k_.size(); ++d) idx = idx * k_[d] + coord[d];
  return idx;
}

std::vector<int> TorusGraph::coord(int index) const {
  std::vector<int> c(k_.size());
  for (std::size_t d = k_.size(); d-- > 0;) {
    c[d] = index % k_[d];
    index /= k_[d];
  }
  return c;
}

std::vector<int> TorusGraph::bfs(int src) const {
  std::vector<int> dist(adj_.size(), -1);
  std::queue<int> frontier;
  dist[src] = 0;
  frontier.push(src);
  while (!frontier.empty()) {
    int v = frontier.front();
    frontier.pop();
    for (int w : adj_[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

int TorusGraph::distance(int a, int b) const { return bfs(a)[b]; }

int bisection_channels(const std::vector<int>& radices) {
  TorusGraph g(radices);
  int best = std::numeric_limits<int>::max();
  for (std::size_t d = 0; d < radices.size(); ++d) {
    int half = radices[d] / 2;
    int crossing = 0;
    for (int v = 0; v < g.nodes(); ++v) {
      bool side = g.coord(v)[d] < half;
      for (int w : g.neighbors(v)) {
        if ((g.coord(w)[d] < half) != side) ++crossing;
      }
    }
    best = std::min(best, crossing);
  }
  return best;
}

double saturating_uniform_rate(const std::vector<int>& radices, double link_gbps,
                               int packet_bytes) {
  int nodes = 1;
  for (int k : radices) nodes *= k;
  double link_rate = link_gbps * 1e9 / (8.0 * packet_bytes);
  return 2.0 * bisection_channels(radices) * link_rate / nodes;
}

}  // namespace oracle
