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

#include "dpadmm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dpadmm/graph.hpp"
#include "dpadmm/noise.hpp"

namespace dpadmm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& token, int line_no) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                             ": bad number '" + token + "'");
  }
  if (pos != token.size()) {
    throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                             ": trailing characters in '" + token + "'");
  }
  return value;
}

struct RawRow {
  std::vector<double> features;  // dense (CSV) or index/value expanded later
  std::vector<std::pair<int, double>> sparse;
  std::string label;
};

// Maps the (at most two) raw label tokens onto {-1, +1}; the
// lexicographically smaller token becomes -1, so the encoding is stable
// across files and loaders.
void assign_labels(const std::vector<std::string>& raw,
                   std::vector<double>* out, LoadResult* result) {
  std::map<std::string, int> distinct;
  for (const auto& token : raw) distinct.emplace(token, 0);
  if (distinct.size() > 2) {
    throw std::runtime_error("label error: more than two distinct labels (" +
                             std::to_string(distinct.size()) + " found)");
  }
  const std::string neg = distinct.begin()->first;
  result->negative_label = neg;
  if (distinct.size() == 2) result->positive_label = std::next(distinct.begin())->first;
  out->reserve(raw.size());
  for (const auto& token : raw) out->push_back(token == neg ? -1.0 : 1.0);
}

LoadResult finish_load(std::vector<Eigen::VectorXd> xs,
                       const std::vector<std::string>& labels) {
  LoadResult result;
  std::vector<double> ys;
  assign_labels(labels, &ys, &result);
  result.points.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    result.raw_max_norm = std::max(result.raw_max_norm, xs[i].norm());
    result.points.push_back(DataPoint{std::move(xs[i]), ys[i]});
  }
  return result;
}

LoadResult load_csv(std::istream& in) {
  std::vector<Eigen::VectorXd> xs;
  std::vector<std::string> labels;
  std::string line;
  int line_no = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::vector<std::string> tokens;
    std::stringstream ss(stripped);
    std::string token;
    while (std::getline(ss, token, ',')) tokens.push_back(trim(token));
    if (tokens.size() < 2) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": need at least one feature and a label");
    }
    const int d = static_cast<int>(tokens.size()) - 1;
    if (dim < 0) dim = d;
    if (d != dim) {
      throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                               ": expected " + std::to_string(dim + 1) +
                               " columns, got " + std::to_string(tokens.size()));
    }
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x[j] = parse_double(tokens[j], line_no);
    xs.push_back(std::move(x));
    labels.push_back(tokens.back());
  }
  if (xs.empty()) throw std::runtime_error("parse error: empty dataset file");
  return finish_load(std::move(xs), labels);
}

LoadResult load_libsvm(std::istream& in) {
  std::vector<std::vector<std::pair<int, double>>> rows;
  std::vector<std::string> labels;
  std::string line;
  int line_no = 0;
  int max_index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    std::stringstream ss(stripped);
    std::string token;
    ss >> token;
    labels.push_back(token);
    std::vector<std::pair<int, double>> entries;
    while (ss >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": expected idx:val, got '" + token + "'");
      }
      const int idx = static_cast<int>(parse_double(token.substr(0, colon), line_no));
      if (idx < 1) {
        throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                 ": indices are 1-based");
      }
      const double val = parse_double(token.substr(colon + 1), line_no);
      entries.emplace_back(idx, val);
      max_index = std::max(max_index, idx);
    }
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw std::runtime_error("parse error: empty dataset file");
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(rows.size());
  for (const auto& row : rows) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(max_index);
    for (const auto& [idx, val] : row) x[idx - 1] = val;
    xs.push_back(std::move(x));
  }
  return finish_load(std::move(xs), labels);
}

}  // namespace

LoadResult load_dataset(const std::string& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return format == DataFormat::kCsv ? load_csv(in) : load_libsvm(in);
}

NormalizeResult normalize(const std::vector<DataPoint>& points) {
  if (points.empty()) throw std::invalid_argument("normalize: empty point list");
  double max_norm = 0.0;
  for (const auto& p : points) max_norm = std::max(max_norm, p.x.norm());
  NormalizeResult result;
  result.scale = max_norm > 1.0 ? max_norm : 1.0;
  result.points.reserve(points.size());
  for (const auto& p : points) {
    result.points.push_back(DataPoint{p.x / result.scale, p.y});
  }
  return result;
}

PartitionedDataset partition(const std::vector<DataPoint>& points,
                             const NetworkGraph& graph,
                             PartitionStrategy strategy, std::uint64_t seed) {
  const int node_count = graph.node_count();
  const int n = static_cast<int>(points.size());
  if (n < node_count) {
    throw std::invalid_argument("partition: fewer points than nodes");
  }

  // Seeded Fisher-Yates over the index set; the deal below is then fixed.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  CounterRng rng = CounterRng::derive(seed, StreamPurpose::kPartition, 0, 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }

  std::vector<int> sizes(node_count, 0);
  if (strategy == PartitionStrategy::kEven) {
    const int base = n / node_count;
    const int extra = n % node_count;
    for (int p = 0; p < node_count; ++p) sizes[p] = base + (p < extra ? 1 : 0);
  } else {
    int degree_sum = 0;
    for (int p = 1; p <= node_count; ++p) degree_sum += graph.degree(p);
    if (degree_sum == 0) {
      sizes[0] = n;  // single isolated node
    } else {
      // Largest-remainder apportionment with a floor of one point per node.
      std::vector<double> quota(node_count);
      int assigned = 0;
      for (int p = 0; p < node_count; ++p) {
        quota[p] = static_cast<double>(n) * graph.degree(p + 1) / degree_sum;
        sizes[p] = std::max(1, static_cast<int>(std::floor(quota[p])));
        assigned += sizes[p];
      }
      std::vector<int> by_remainder(node_count);
      for (int p = 0; p < node_count; ++p) by_remainder[p] = p;
      std::stable_sort(by_remainder.begin(), by_remainder.end(),
                       [&](int a, int b) {
                         return quota[a] - std::floor(quota[a]) >
                                quota[b] - std::floor(quota[b]);
                       });
      int idx = 0;
      while (assigned < n) {
        ++sizes[by_remainder[idx % node_count]];
        ++assigned;
        ++idx;
      }
      while (assigned > n) {
        int p = by_remainder[idx % node_count];
        if (sizes[p] > 1) {
          --sizes[p];
          --assigned;
        }
        ++idx;
      }
    }
  }

  PartitionedDataset out;
  out.per_node.resize(node_count);
  int cursor = 0;
  for (int p = 0; p < node_count; ++p) {
    out.per_node[p].node_id = p + 1;
    out.per_node[p].points.reserve(sizes[p]);
    for (int k = 0; k < sizes[p]; ++k) {
      out.per_node[p].points.push_back(points[order[cursor++]]);
    }
  }
  return out;
}

NodeDataset neighboring_dataset(const NodeDataset& dataset, int index,
                                const DataPoint& replacement) {
  if (index < 0 || index >= dataset.size()) {
    throw std::out_of_range("neighboring_dataset: index out of range");
  }
  if (replacement.x.norm() > 1.0 + 1e-12) {
    throw std::invalid_argument("neighboring_dataset: replacement ||x|| > 1");
  }
  if (replacement.y != 1.0 && replacement.y != -1.0) {
    throw std::invalid_argument("neighboring_dataset: replacement label not in {-1, +1}");
  }
  NodeDataset out = dataset;
  out.points[index] = replacement;
  return out;
}

int hamming_distance(const NodeDataset& a, const NodeDataset& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming_distance: size mismatch");
  }
  int count = 0;
  for (int i = 0; i < a.size(); ++i) {
    const DataPoint& pa = a.points[i];
    const DataPoint& pb = b.points[i];
    if (pa.y != pb.y || pa.x.size() != pb.x.size() || pa.x != pb.x) ++count;
  }
  return count;
}

}  // namespace dpadmm
