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

#ifndef DPADMM_DATASET_HPP
#define DPADMM_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace dpadmm {

class NetworkGraph;

// One labeled sample. After normalization ||x|| <= 1 and y is -1 or +1.
struct DataPoint {
  Eigen::VectorXd x;
  double y = 1.0;
};

// The training sample held by one node. Node ids are 1-based.
struct NodeDataset {
  std::vector<DataPoint> points;
  int node_id = 1;

  int size() const { return static_cast<int>(points.size()); }
  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().x.size()); }
};

struct PartitionedDataset {
  std::vector<NodeDataset> per_node;  // index p-1 holds node p

  int node_count() const { return static_cast<int>(per_node.size()); }
};

enum class DataFormat { kCsv, kLibsvm };

struct LoadResult {
  std::vector<DataPoint> points;
  double raw_max_norm = 0.0;           // max ||x|| before any normalization
  std::string negative_label;          // raw token mapped to -1
  std::string positive_label;          // raw token mapped to +1 (empty if single-label file)
};

// Reads a dataset file. CSV: d feature columns then a label column.
// LIBSVM: "label idx:val ..." with 1-based indices. Raw labels may be any
// two distinct tokens; the lexicographically smaller token maps to -1.
// Features are returned as-is; callers normalize separately.
LoadResult load_dataset(const std::string& path, DataFormat format);

struct NormalizeResult {
  std::vector<DataPoint> points;
  double scale = 1.0;  // divisor applied to every feature vector
};

// Divides all feature vectors by the global max norm when it exceeds 1,
// otherwise returns the input unchanged. Preserves relative geometry.
NormalizeResult normalize(const std::vector<DataPoint>& points);

enum class PartitionStrategy { kEven, kByWeights };

// Deterministically shuffles and deals points to the graph's nodes.
// kEven: sizes differ by at most one. kByWeights: sizes proportional to node
// degree (largest remainder, at least one point per node).
PartitionedDataset partition(const std::vector<DataPoint>& points,
                             const NetworkGraph& graph,
                             PartitionStrategy strategy, std::uint64_t seed);

// Returns a copy of `dataset` with the point at `index` replaced, i.e. a
// dataset at Hamming distance <= 1 (0 when the replacement equals the
// original point).
NodeDataset neighboring_dataset(const NodeDataset& dataset, int index,
                                const DataPoint& replacement);

// Number of positions at which the two equally sized datasets differ.
int hamming_distance(const NodeDataset& a, const NodeDataset& b);

}  // namespace dpadmm

#endif  // DPADMM_DATASET_HPP
