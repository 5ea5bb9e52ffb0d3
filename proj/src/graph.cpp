//
// Copyright 2026 The dpadmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpadmm/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dpadmm/noise.hpp"

namespace dpadmm {

NetworkGraph::NetworkGraph(int node_count,
                           const std::vector<std::pair<int, int>>& edges)
    : node_count_(node_count) {
  if (node_count < 1) throw std::invalid_argument("NetworkGraph: node_count < 1");
  std::set<std::pair<int, int>> canonical;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("NetworkGraph: self-loop");
    if (a < 1 || a > node_count || b < 1 || b > node_count) {
      throw std::invalid_argument("NetworkGraph: edge endpoint out of range");
    }
    canonical.emplace(std::min(a, b), std::max(a, b));
  }
  edges_.assign(canonical.begin(), canonical.end());
  adjacency_.resize(node_count);
  for (auto [a, b] : edges_) {
    adjacency_[a - 1].push_back(b);
    adjacency_[b - 1].push_back(a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
  if (!is_connected(node_count_, edges_)) {
    throw std::invalid_argument("NetworkGraph: graph is not connected");
  }
}

const std::vector<int>& NetworkGraph::neighbors(int p) const {
  if (p < 1 || p > node_count_) {
    throw std::out_of_range("NetworkGraph::neighbors: node id out of range");
  }
  return adjacency_[p - 1];
}

bool is_connected(int node_count,
                  const std::vector<std::pair<int, int>>& edges) {
  if (node_count <= 1) return true;
  std::vector<std::vector<int>> adj(node_count);
  for (auto [a, b] : edges) {
    adj[a - 1].push_back(b - 1);
    adj[b - 1].push_back(a - 1);
  }
  std::vector<bool> seen(node_count, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == node_count;
}

NetworkGraph build_topology(TopologyKind kind, int node_count,
                            double edge_prob, std::uint64_t seed) {
  if (node_count < 1) throw std::invalid_argument("build_topology: node_count < 1");
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case TopologyKind::kComplete:
      for (int a = 1; a <= node_count; ++a)
        for (int b = a + 1; b <= node_count; ++b) edges.emplace_back(a, b);
      return NetworkGraph(node_count, edges);
    case TopologyKind::kRing:
      for (int a = 1; a < node_count; ++a) edges.emplace_back(a, a + 1);
      if (node_count > 2) edges.emplace_back(node_count, 1);
      return NetworkGraph(node_count, edges);
    case TopologyKind::kLine:
      for (int a = 1; a < node_count; ++a) edges.emplace_back(a, a + 1);
      return NetworkGraph(node_count, edges);
    case TopologyKind::kErdosRenyi: {
      if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
        throw std::invalid_argument("build_topology: prob must be in (0, 1]");
      }
      for (int attempt = 0; attempt < 1000; ++attempt) {
        CounterRng rng = CounterRng::derive(seed, StreamPurpose::kGraph,
                                            static_cast<std::uint64_t>(attempt), 0);
        edges.clear();
        for (int a = 1; a <= node_count; ++a) {
          for (int b = a + 1; b <= node_count; ++b) {
            if (rng.next_unit() < edge_prob) edges.emplace_back(a, b);
          }
        }
        if (is_connected(node_count, edges)) return NetworkGraph(node_count, edges);
      }
      throw std::runtime_error(
          "build_topology: no connected graph within 1000 attempts");
    }
  }
  throw std::invalid_argument("build_topology: unknown kind");
}

NetworkGraph parse_topology_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ':')) parts.push_back(token);
  if (parts.size() < 2) {
    throw std::invalid_argument("topology spec: expected '<kind>:<nodes>[...]', got '" +
                                spec + "'");
  }
  const std::string& kind = parts[0];
  const int nodes = std::stoi(parts[1]);
  if (kind == "complete") return build_topology(TopologyKind::kComplete, nodes);
  if (kind == "ring") return build_topology(TopologyKind::kRing, nodes);
  if (kind == "line") return build_topology(TopologyKind::kLine, nodes);
  if (kind == "er") {
    if (parts.size() < 3) {
      throw std::invalid_argument("topology spec: er needs a probability");
    }
    const double prob = std::stod(parts[2]);
    std::uint64_t seed = 0;
    if (parts.size() >= 4) {
      if (parts[3].rfind("seed=", 0) != 0) {
        throw std::invalid_argument("topology spec: expected seed=<n>");
      }
      seed = std::stoull(parts[3].substr(5));
    }
    return build_topology(TopologyKind::kErdosRenyi, nodes, prob, seed);
  }
  throw std::invalid_argument("topology spec: unknown kind '" + kind + "'");
}

}  // namespace dpadmm
