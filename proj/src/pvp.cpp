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

#include "dpadmm/pvp.hpp"

#include <stdexcept>

#include "dpadmm/noise.hpp"

namespace dpadmm {

double pvp_zeta(double rho, double b_p, double alpha, double c_r) {
  if (!(rho > 0.0) || !(b_p > 0.0) || !(alpha > 0.0) || !(c_r > 0.0)) {
    throw std::invalid_argument("pvp_zeta: inputs must be positive");
  }
  return rho * b_p * alpha / (2.0 * c_r);
}

double pvp_sensitivity_bound(double c_r, double rho, double b_p) {
  if (!(rho > 0.0) || !(b_p > 0.0) || !(c_r > 0.0)) {
    throw std::invalid_argument("pvp_sensitivity_bound: inputs must be positive");
  }
  return 2.0 * c_r / (rho * b_p);
}

Eigen::VectorXd primal_update_pvp(const NodeState& state,
                                  const std::vector<Eigen::VectorXd>& neighbor_v,
                                  const NodeDataset& dataset,
                                  const LossModel& loss, const Regularizer& reg,
                                  const AdmmConfig& config) {
  NodeObjective objective;
  objective.points = &dataset.points;
  objective.loss = &loss;
  objective.reg = &reg;
  objective.loss_scale = config.erm.c_r / dataset.size();
  objective.rho = config.erm.rho;
  objective.linear = 2.0 * state.lambda;
  objective.eta = config.eta;
  objective.centers.reserve(neighbor_v.size());
  for (const auto& vi : neighbor_v) {
    Eigen::VectorXd center = state.f + vi;
    if (state.last_noise.size() > 0) center -= state.last_noise;
    objective.centers.push_back(0.5 * center);
  }
  NewtonOptions options;
  options.tol = config.inner_tol;
  options.max_iters = config.inner_max_iters;
  return minimize_newton(objective, state.f, options).f;
}

Eigen::VectorXd perturb_primal(const Eigen::VectorXd& f_new,
                               const Eigen::VectorXd& noise) {
  if (f_new.size() != noise.size()) {
    throw std::invalid_argument("perturb_primal: dimension mismatch");
  }
  return f_new + noise;
}

Eigen::VectorXd dual_update_pvp(const Eigen::VectorXd& lambda,
                                const Eigen::VectorXd& own_v,
                                const std::vector<Eigen::VectorXd>& neighbor_v,
                                double eta) {
  return dual_update(lambda, own_v, neighbor_v, eta);
}

RunTrace run_pvp(const PartitionedDataset& partitioned, const NetworkGraph& graph,
                 const LossModel& loss, const Regularizer& reg,
                 const AdmmConfig& config, const AlphaSchedule& schedule,
                 int t_stop, ZetaRule final_round_rule, std::uint64_t seed) {
  const int node_count = partitioned.node_count();
  if (node_count != graph.node_count()) {
    throw std::invalid_argument("run_pvp: partition/graph node count mismatch");
  }
  if (t_stop < 1 || t_stop >= config.max_iters) {
    throw std::invalid_argument("run_pvp: t_stop must lie in [1, max_iters)");
  }
  int min_size = partitioned.per_node.front().size();
  for (const auto& node : partitioned.per_node) {
    if (node.size() == 0) throw std::invalid_argument("run_pvp: empty node dataset");
    min_size = std::min(min_size, node.size());
  }
  validate_erm_params(config.erm, min_size);

  std::vector<NodeState> states = initial_states(partitioned, config, seed);
  const int d = partitioned.per_node.front().dim();
  // The initial broadcast carries the (data-independent) random f_p(0)
  // unperturbed, so there is no own-noise to subtract in the first round.
  for (auto& state : states) {
    state.v = state.f;
    state.last_noise = Eigen::VectorXd::Zero(d);
  }

  RunTrace trace;
  trace.mechanism = "pvp";
  trace.dim = d;

  for (int t = 0; t < t_stop; ++t) {
    const double alpha = schedule.alpha(t);
    std::vector<Eigen::VectorXd> new_f(node_count), new_v(node_count);
    std::vector<NodeRecord> records(node_count);
    for (int p = 0; p < node_count; ++p) {
      const NodeDataset& dataset = partitioned.per_node[p];
      std::vector<Eigen::VectorXd> neighbor_v;
      neighbor_v.reserve(graph.degree(p + 1));
      for (int j : graph.neighbors(p + 1)) neighbor_v.push_back(states[j - 1].v);
      PvpParams params;
      params.alpha = alpha;
      params.zeta = pvp_zeta(config.erm.rho, dataset.size(), alpha, config.erm.c_r);
      params.t_stop = t_stop;
      NoiseSpec spec;
      spec.dim = d;
      spec.zeta = params.zeta;
      spec.stream = CounterRng::derive(seed, StreamPurpose::kMechanism,
                                       static_cast<std::uint64_t>(p + 1),
                                       static_cast<std::uint64_t>(t + 1));
      const Eigen::VectorXd eps = sample_noise(spec);
      try {
        new_f[p] = primal_update_pvp(states[p], neighbor_v, dataset, loss, reg,
                                     config);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("node " + std::to_string(p + 1) + ", iteration " +
                                 std::to_string(t + 1) + ": " + e.what());
      }
      new_v[p] = perturb_primal(new_f[p], eps);
      states[p].last_noise = eps;
      records[p].noise_norm = eps.norm();
      records[p].zeta = params.zeta;
      records[p].v_norm = new_v[p].norm();
    }
    IterationRecord record;
    record.iteration = t + 1;
    record.residual = consensus_residual(new_f, graph);
    record.nodes = std::move(records);
    for (int p = 0; p < node_count; ++p) {
      std::vector<Eigen::VectorXd> neighbor_new_v;
      neighbor_new_v.reserve(graph.degree(p + 1));
      for (int j : graph.neighbors(p + 1)) neighbor_new_v.push_back(new_v[j - 1]);
      states[p].lambda = dual_update_pvp(states[p].lambda, new_v[p],
                                         neighbor_new_v, config.eta);
      states[p].f = new_f[p];
      states[p].v = new_v[p];
      NodeRecord& node = record.nodes[p];
      node.f = states[p].f;
      node.lambda = states[p].lambda;
      node.payload = new_v[p];
      node.empirical_loss = node_empirical_loss(states[p].f, partitioned.per_node[p],
                                                loss, config.erm);
    }
    trace.iterations.push_back(std::move(record));
  }

  // Final round: one dual-perturbation pass seeded with the latest state.
  // Each node only ever saw its neighbors' sanitized V's, so those stand in
  // for the neighbor primals in the consensus centers.
  {
    const int t = t_stop;
    const double alpha = schedule.alpha(t);
    std::vector<Eigen::VectorXd> new_f(node_count);
    std::vector<NodeRecord> records(node_count);
    for (int p = 0; p < node_count; ++p) {
      const NodeDataset& dataset = partitioned.per_node[p];
      const int n_p = graph.degree(p + 1);
      const DvpParams params =
          dvp_calibrate(alpha, loss.c1, dataset.size(), config.erm.c_r,
                        config.erm.rho, config.eta, n_p, final_round_rule);
      NoiseSpec spec;
      spec.dim = d;
      spec.zeta = params.zeta;
      spec.stream = CounterRng::derive(seed, StreamPurpose::kMechanism,
                                       static_cast<std::uint64_t>(p + 1),
                                       static_cast<std::uint64_t>(t + 1));
      const Eigen::VectorXd eps = sample_noise(spec);
      const Eigen::VectorXd mu =
          perturb_dual(states[p].lambda, eps, config.erm.c_r, dataset.size());
      std::vector<Eigen::VectorXd> neighbor_v;
      neighbor_v.reserve(n_p);
      for (int j : graph.neighbors(p + 1)) neighbor_v.push_back(states[j - 1].v);
      try {
        new_f[p] = primal_update_dvp(states[p], neighbor_v, dataset, loss, reg,
                                     config, params, mu);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("node " + std::to_string(p + 1) +
                                 ", final iteration " + std::to_string(t + 1) +
                                 ": " + e.what());
      }
      states[p].last_noise = eps;
      records[p].noise_norm = eps.norm();
      records[p].alpha_hat = params.alpha_hat;
      records[p].phi = params.phi;
      records[p].zeta = params.zeta;
    }
    IterationRecord record;
    record.iteration = t + 1;
    record.is_final = true;
    record.residual = consensus_residual(new_f, graph);
    record.nodes = std::move(records);
    for (int p = 0; p < node_count; ++p) {
      std::vector<Eigen::VectorXd> neighbor_new;
      neighbor_new.reserve(graph.degree(p + 1));
      for (int j : graph.neighbors(p + 1)) neighbor_new.push_back(new_f[j - 1]);
      states[p].lambda = dual_update(states[p].lambda, new_f[p], neighbor_new,
                                     config.eta);
      states[p].f = new_f[p];
      states[p].v = new_f[p];
      NodeRecord& node = record.nodes[p];
      node.f = states[p].f;
      node.lambda = states[p].lambda;
      node.payload = new_f[p];
      node.v_norm = new_f[p].norm();
      node.empirical_loss = node_empirical_loss(states[p].f, partitioned.per_node[p],
                                                loss, config.erm);
    }
    trace.iterations.push_back(std::move(record));
  }
  return trace;
}

}  // namespace dpadmm
