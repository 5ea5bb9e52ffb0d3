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

#ifndef DPADMM_GRAPH_HPP
#define DPADMM_GRAPH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dpadmm {

// Undirected communication topology over nodes 1..P. Construction rejects
// self-loops, out-of-range endpoints and disconnected graphs, because the
// consensus reformulation solved here is only equivalent to the centralized
// problem on a connected graph. Immutable once built.
class NetworkGraph {
 public:
  NetworkGraph(int node_count, const std::vector<std::pair<int, int>>& edges);

  int node_count() const { return node_count_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Neighbor ids of node p (1-based), sorted ascending.
  const std::vector<int>& neighbors(int p) const;
  int degree(int p) const { return static_cast<int>(neighbors(p).size()); }

 private:
  int node_count_;
  std::vector<std::pair<int, int>> edges_;          // canonical (min, max) pairs
  std::vector<std::vector<int>> adjacency_;         // index p-1
};

// Breadth-first reachability of all nodes from node 1. A single node with no
// edges counts as connected.
bool is_connected(int node_count, const std::vector<std::pair<int, int>>& edges);

enum class TopologyKind { kComplete, kRing, kLine, kErdosRenyi };

// Builds a connected topology. Random graphs are re-sampled with an
// incremented sub-seed until connected, up to 1000 attempts.
NetworkGraph build_topology(TopologyKind kind, int node_count,
                            double edge_prob = 0.0, std::uint64_t seed = 0);

// Parses "complete:4", "ring:8", "line:3" or "er:10:0.3:seed=7"
// (the seed suffix is optional and defaults to 0).
NetworkGraph parse_topology_spec(const std::string& spec);

}  // namespace dpadmm

#endif  // DPADMM_GRAPH_HPP
