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

#include "dpadmm/dvp.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "dpadmm/noise.hpp"

namespace dpadmm {

DvpParams dvp_calibrate(double alpha, double c1, double b_p, double c_r,
                        double rho, double eta, int n_p, ZetaRule rule) {
  if (!(alpha > 0.0) || !(b_p > 0.0) || !(c_r > 0.0) || !(rho > 0.0) ||
      !(eta > 0.0) || c1 < 0.0 || n_p < 0) {
    throw std::invalid_argument("dvp_calibrate: nonpositive input");
  }
  DvpParams params;
  params.alpha = alpha;
  params.rule = rule;
  params.alpha_above_one = alpha > 1.0;

  const double ratio = b_p / c_r;
  const double log_term =
      2.0 * std::log1p(c1 / (ratio * (rho + 2.0 * eta * n_p)));
  double alpha_hat = alpha - log_term;
  double phi = 0.0;
  if (alpha_hat <= 0.0) {
    phi = c1 / (ratio * (std::exp(alpha / 4.0) - 1.0)) - rho - 2.0 * eta * n_p;
    if (phi < 0.0) {
      phi = 0.0;
      params.phi_clamped = true;
      std::cerr << "dvp_calibrate: ridge formula negative, clamped to 0\n";
    }
    alpha_hat = alpha / 2.0;
  }
  params.alpha_hat = alpha_hat;
  params.phi = phi;
  params.zeta = rule == ZetaRule::kProofHalf ? alpha_hat / 2.0 : alpha_hat;
  return params;
}

Eigen::VectorXd perturb_dual(const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& noise, double c_r,
                             double b_p) {
  if (lambda.size() != noise.size()) {
    throw std::invalid_argument("perturb_dual: dimension mismatch");
  }
  return lambda + c_r / (2.0 * b_p) * noise;
}

Eigen::VectorXd primal_update_dvp(const NodeState& state,
                                  const std::vector<Eigen::VectorXd>& neighbor_primal,
                                  const NodeDataset& dataset,
                                  const LossModel& loss, const Regularizer& reg,
                                  const AdmmConfig& config,
                                  const DvpParams& params,
                                  const Eigen::VectorXd& mu) {
  NodeObjective objective;
  objective.points = &dataset.points;
  objective.loss = &loss;
  objective.reg = &reg;
  objective.loss_scale = config.erm.c_r / dataset.size();
  objective.rho = config.erm.rho;
  objective.linear = 2.0 * mu;
  objective.ridge = params.phi;
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

Eigen::VectorXd kkt_recover_noise(const Eigen::VectorXd& f_opt,
                                  const NodeState& state_at_t,
                                  const std::vector<Eigen::VectorXd>& neighbor_primal,
                                  const NodeDataset& dataset,
                                  const LossModel& loss, const Regularizer& reg,
                                  const AdmmConfig& config,
                                  const DvpParams& params) {
  if (f_opt.size() != dataset.dim()) {
    throw std::invalid_argument("kkt_recover_noise: dimension mismatch");
  }
  const double b_p = dataset.size();
  const double c_r = config.erm.c_r;
  const double scale = b_p / c_r;
  const int n_p = static_cast<int>(neighbor_primal.size());

  Eigen::VectorXd eps = Eigen::VectorXd::Zero(f_opt.size());
  for (const auto& p : dataset.points) {
    eps -= p.y * loss.first_derivative(p.y * f_opt.dot(p.x)) * p.x;
  }
  eps -= scale * config.erm.rho * reg.gradient(f_opt);
  eps -= 2.0 * scale * state_at_t.lambda;
  eps -= scale * (params.phi + 2.0 * config.eta * n_p) * f_opt;
  for (const auto& fi : neighbor_primal) {
    eps += scale * config.eta * (state_at_t.f + fi);
  }
  return eps;
}

AlphaSchedule::AlphaSchedule(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::invalid_argument("AlphaSchedule: empty schedule");
  }
  for (double a : values_) {
    if (!(a > 0.0)) throw std::invalid_argument("AlphaSchedule: alpha must be positive");
  }
}

double AlphaSchedule::alpha(int t) const {
  if (t < 0) throw std::invalid_argument("AlphaSchedule: negative iteration");
  const std::size_t idx = std::min<std::size_t>(t, values_.size() - 1);
  return values_[idx];
}

RunTrace run_dvp(const PartitionedDataset& partitioned, const NetworkGraph& graph,
                 const LossModel& loss, const Regularizer& reg,
                 const AdmmConfig& config, const AlphaSchedule& schedule,
                 ZetaRule rule, std::uint64_t seed) {
  const int node_count = partitioned.node_count();
  if (node_count != graph.node_count()) {
    throw std::invalid_argument("run_dvp: partition/graph node count mismatch");
  }
  int min_size = partitioned.per_node.front().size();
  for (const auto& node : partitioned.per_node) {
    if (node.size() == 0) throw std::invalid_argument("run_dvp: empty node dataset");
    min_size = std::min(min_size, node.size());
  }
  validate_erm_params(config.erm, min_size);

  std::vector<NodeState> states = initial_states(partitioned, config, seed);
  const int d = partitioned.per_node.front().dim();
  RunTrace trace;
  trace.mechanism = "dvp";
  trace.dim = d;
  bool warned_alpha = false;

  for (int t = 0; t < config.max_iters; ++t) {
    const double alpha = schedule.alpha(t);
    std::vector<Eigen::VectorXd> new_f(node_count);
    std::vector<NodeRecord> records(node_count);
    for (int p = 0; p < node_count; ++p) {
      const NodeDataset& dataset = partitioned.per_node[p];
      const int n_p = graph.degree(p + 1);
      const DvpParams params =
          dvp_calibrate(alpha, loss.c1, dataset.size(), config.erm.c_r,
                        config.erm.rho, config.eta, n_p, rule);
      if (params.alpha_above_one && !warned_alpha) {
        std::cerr << "run_dvp: alpha > 1 is outside the analyzed regime\n";
        warned_alpha = true;
      }
      NoiseSpec spec;
      spec.dim = d;
      spec.zeta = params.zeta;
      spec.stream = CounterRng::derive(seed, StreamPurpose::kMechanism,
                                       static_cast<std::uint64_t>(p + 1),
                                       static_cast<std::uint64_t>(t + 1));
      const Eigen::VectorXd eps = sample_noise(spec);
      const Eigen::VectorXd mu =
          perturb_dual(states[p].lambda, eps, config.erm.c_r, dataset.size());
      std::vector<Eigen::VectorXd> neighbor_primal;
      neighbor_primal.reserve(n_p);
      for (int j : graph.neighbors(p + 1)) neighbor_primal.push_back(states[j - 1].f);
      try {
        new_f[p] = primal_update_dvp(states[p], neighbor_primal, dataset, loss,
                                     reg, config, params, mu);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error("node " + std::to_string(p + 1) + ", iteration " +
                                 std::to_string(t + 1) + ": " + e.what());
      }
      states[p].mu = mu;
      states[p].last_noise = eps;
      records[p].noise_norm = eps.norm();
      records[p].alpha_hat = params.alpha_hat;
      records[p].phi = params.phi;
      records[p].zeta = params.zeta;
    }
    IterationRecord record;
    record.iteration = t + 1;
    record.residual = consensus_residual(new_f, graph);
    record.nodes = std::move(records);
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

}  // namespace dpadmm
