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

#include "dpadmm/admm.hpp"

#include <cstdio>
#include <stdexcept>

#include "dpadmm/noise.hpp"

namespace dpadmm {

namespace {

void append_double(std::string* out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  *out += buf;
}

}  // namespace

std::string RunTrace::to_csv() const {
  std::string out = "iteration,node,empirical_loss,consensus_residual";
  if (mechanism == "dvp") out += ",noise_norm,alpha_hat,phi,zeta";
  if (mechanism == "pvp") out += ",noise_norm,zeta,v_norm,is_final_iteration";
  for (int j = 0; j < dim; ++j) out += ",f_" + std::to_string(j);
  out += "\n";
  for (const auto& iter : iterations) {
    for (std::size_t p = 0; p < iter.nodes.size(); ++p) {
      const NodeRecord& node = iter.nodes[p];
      out += std::to_string(iter.iteration);
      out += ',' + std::to_string(p + 1) + ',';
      append_double(&out, node.empirical_loss);
      out += ',';
      append_double(&out, iter.residual);
      if (mechanism == "dvp") {
        out += ',';
        append_double(&out, node.noise_norm);
        out += ',';
        append_double(&out, node.alpha_hat);
        out += ',';
        append_double(&out, node.phi);
        out += ',';
        append_double(&out, node.zeta);
      }
      if (mechanism == "pvp") {
        out += ',';
        append_double(&out, node.noise_norm);
        out += ',';
        append_double(&out, node.zeta);
        out += ',';
        append_double(&out, node.v_norm);
        out += ',' + std::to_string(iter.is_final ? 1 : 0);
      }
      for (int j = 0; j < dim; ++j) {
        out += ',';
        append_double(&out, node.f[j]);
      }
      out += '\n';
    }
  }
  return out;
}

Eigen::VectorXd primal_update_nonprivate(
    const NodeState& state, const std::vector<Eigen::VectorXd>& neighbor_primal,
    const NodeDataset& dataset, const LossModel& loss, const Regularizer& reg,
    const AdmmConfig& config) {
  NodeObjective objective;
  objective.points = &dataset.points;
  objective.loss = &loss;
  objective.reg = &reg;
  objective.loss_scale = config.erm.c_r / dataset.size();
  objective.rho = config.erm.rho;
  objective.linear = 2.0 * state.lambda;
  objective.eta = config.eta;
  objective.centers.reserve(neighbor_primal.size());
  for (const auto& fi : neighbor_primal) {
    objective.centers.push_back(0.5 * (state.f + fi));
  }
  NewtonOptions options;
  options.tol = config.inner_tol;
  options.max_iters = config.inner_max_iters;
  return minimize_newton(objective, state.f, options).f;
}

Eigen::VectorXd dual_update(const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& own_f_new,
                            const std::vector<Eigen::VectorXd>& neighbor_f_new,
                            double eta) {
  Eigen::VectorXd out = lambda;
  for (const auto& fj : neighbor_f_new) {
    if (fj.size() != own_f_new.size() || lambda.size() != own_f_new.size()) {
      throw std::invalid_argument("dual_update: dimension mismatch");
    }
    out += 0.5 * eta * (own_f_new - fj);
  }
  return out;
}

std::vector<NodeState> initial_states(const PartitionedDataset& partitioned,
                                      const AdmmConfig& config,
                                      std::uint64_t seed) {
  const int node_count = partitioned.node_count();
  const int d = partitioned.per_node.front().dim();
  std::vector<NodeState> states(node_count);
  for (int p = 0; p < node_count; ++p) {
    CounterRng rng = CounterRng::derive(seed, StreamPurpose::kInit,
                                        static_cast<std::uint64_t>(p + 1), 0);
    states[p].f.resize(d);
    for (int j = 0; j < d; ++j) states[p].f[j] = config.init_scale * rng.normal();
    states[p].lambda = Eigen::VectorXd::Zero(d);
  }
  return states;
}

double node_empirical_loss(const Eigen::VectorXd& f, const NodeDataset& dataset,
                           const LossModel& loss, const ErmParams& params) {
  double sum = 0.0;
  for (const auto& p : dataset.points) sum += loss.value(p.y * f.dot(p.x));
  return params.c_r / dataset.size() * sum;
}

double consensus_residual(const std::vector<Eigen::VectorXd>& classifiers,
                          const NetworkGraph& graph) {
  double worst = 0.0;
  for (auto [a, b] : graph.edges()) {
    const double gap = (classifiers[a - 1] - classifiers[b - 1]).norm();
    if (gap > worst) worst = gap;
  }
  return worst;
}

RunTrace run_nonprivate(const PartitionedDataset& partitioned,
                        const NetworkGraph& graph, const LossModel& loss,
                        const Regularizer& reg, const AdmmConfig& config,
                        std::uint64_t seed) {
  const int node_count = partitioned.node_count();
  if (node_count != graph.node_count()) {
    throw std::invalid_argument("run_nonprivate: partition/graph node count mismatch");
  }
  int min_size = partitioned.per_node.front().size();
  for (const auto& node : partitioned.per_node) {
    if (node.size() == 0) throw std::invalid_argument("run_nonprivate: empty node dataset");
    min_size = std::min(min_size, node.size());
  }
  validate_erm_params(config.erm, min_size);

  std::vector<NodeState> states = initial_states(partitioned, config, seed);
  RunTrace trace;
  trace.mechanism = "none";
  trace.dim = partitioned.per_node.front().dim();

  for (int t = 0; t < config.max_iters; ++t) {
    std::vector<Eigen::VectorXd> new_f(node_count);
    for (int p = 0; p < node_count; ++p) {
      std::vector<Eigen::VectorXd> neighbor_primal;
      neighbor_primal.reserve(graph.degree(p + 1));
      for (int j : graph.neighbors(p + 1)) neighbor_primal.push_back(states[j - 1].f);
      try {
        new_f[p] = primal_update_nonprivate(states[p], neighbor_primal,
                                            partitioned.per_node[p], loss, reg,
                                            config);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("node " + std::to_string(p + 1) + ", iteration " +
                                 std::to_string(t + 1) + ": " + e.what());
      }
    }
    // Broadcast barrier: dual updates see all new primals.
    IterationRecord record;
    record.iteration = t + 1;
    record.residual = consensus_residual(new_f, graph);
    record.nodes.resize(node_count);
    for (int p = 0; p < node_count; ++p) {
      std::vector<Eigen::VectorXd> neighbor_new;
      neighbor_new.reserve(graph.degree(p + 1));
      for (int j : graph.neighbors(p + 1)) neighbor_new.push_back(new_f[j - 1]);
      states[p].lambda = dual_update(states[p].lambda, new_f[p], neighbor_new,
                                     config.eta);
      states[p].f = new_f[p];
      NodeRecord& node = record.nodes[p];
      node.f = states[p].f;
      node.lambda = states[p].lambda;
      node.payload = new_f[p];
      node.empirical_loss = node_empirical_loss(states[p].f, partitioned.per_node[p],
                                                loss, config.erm);
    }
    trace.iterations.push_back(std::move(record));
  }
  return trace;
}

Eigen::VectorXd centralized_solve(const PartitionedDataset& partitioned,
                                  const LossModel& loss, const Regularizer& reg,
                                  const ErmParams& params, double tol) {
  if (partitioned.per_node.empty()) {
    throw std::invalid_argument("centralized_solve: no nodes");
  }
  const int b = partitioned.per_node.front().size();
  for (const auto& node : partitioned.per_node) {
    if (node.size() != b) {
      throw std::invalid_argument("centralized_solve: unequal node sample counts");
    }
  }
  validate_erm_params(params, b);
  std::vector<DataPoint> pooled;
  pooled.reserve(static_cast<std::size_t>(b) * partitioned.node_count());
  for (const auto& node : partitioned.per_node) {
    pooled.insert(pooled.end(), node.points.begin(), node.points.end());
  }
  NodeObjective objective;
  objective.points = &pooled;
  objective.loss = &loss;
  objective.reg = &reg;
  objective.loss_scale = params.c_r / b;
  objective.rho = params.rho;
  NewtonOptions options;
  options.tol = tol;
  options.max_iters = 500;
  const int d = partitioned.per_node.front().dim();
  return minimize_newton(objective, Eigen::VectorXd::Zero(d), options).f;
}

}  // namespace dpadmm
