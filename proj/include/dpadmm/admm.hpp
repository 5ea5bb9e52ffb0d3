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

#ifndef DPADMM_ADMM_HPP
#define DPADMM_ADMM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dpadmm/dataset.hpp"
#include "dpadmm/graph.hpp"
#include "dpadmm/objective.hpp"
#include "dpadmm/solver.hpp"

namespace dpadmm {

// Per-node learning state. All vectors share the feature dimension; lambda
// starts at zero. mu, v and last_noise are only populated by the private
// mechanisms.
struct NodeState {
  Eigen::VectorXd f;
  Eigen::VectorXd lambda;
  Eigen::VectorXd mu;
  Eigen::VectorXd v;
  Eigen::VectorXd last_noise;
};

struct AdmmConfig {
  double eta = 1.0;
  int max_iters = 100;
  double inner_tol = 1e-8;
  double init_scale = 0.01;
  int inner_max_iters = 200;
  ErmParams erm;
};

// One node's slice of one iteration record. Mechanism-specific fields stay
// at zero for runs that do not use them.
struct NodeRecord {
  Eigen::VectorXd f;
  Eigen::VectorXd lambda;
  Eigen::VectorXd payload;  // what this node broadcast this round
  double empirical_loss = 0.0;
  double noise_norm = 0.0;
  double alpha_hat = 0.0;
  double phi = 0.0;
  double zeta = 0.0;
  double v_norm = 0.0;
};

struct IterationRecord {
  int iteration = 0;      // 1-based; record t holds f_p(t)
  bool is_final = false;  // the mechanism-designated final round (PVP)
  double residual = 0.0;  // max ||f_p - f_j|| over edges
  std::vector<NodeRecord> nodes;
};

// Append-only record of a run, sufficient to audit broadcasts and replot
// every figure. to_csv emits one row per node per iteration; the header
// depends on the mechanism and is documented in the README.
struct RunTrace {
  std::string mechanism;  // "none", "dvp" or "pvp"
  int dim = 0;
  std::vector<IterationRecord> iterations;

  std::string to_csv() const;
};

// argmin of the consensus objective: local ERM term + rho R + 2 lambda.f
// + eta sum_i ||f - (f_p(t) + f_i(t)) / 2||^2, warm-started at state.f.
// neighbor_primal holds the neighbors' iterate-t broadcasts.
Eigen::VectorXd primal_update_nonprivate(
    const NodeState& state, const std::vector<Eigen::VectorXd>& neighbor_primal,
    const NodeDataset& dataset, const LossModel& loss, const Regularizer& reg,
    const AdmmConfig& config);

// lambda(t+1) = lambda(t) + eta/2 * sum_j (f_own - f_j), all at t+1.
Eigen::VectorXd dual_update(const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& own_f_new,
                            const std::vector<Eigen::VectorXd>& neighbor_f_new,
                            double eta);

// Synchronous-round consensus run: within a round every primal update reads
// the previous round's broadcasts, then every dual update runs.
RunTrace run_nonprivate(const PartitionedDataset& partitioned,
                        const NetworkGraph& graph, const LossModel& loss,
                        const Regularizer& reg, const AdmmConfig& config,
                        std::uint64_t seed);

// Newton solve of the centralized objective to gradient norm <= tol;
// the oracle the consensus runs are compared against.
Eigen::VectorXd centralized_solve(const PartitionedDataset& partitioned,
                                  const LossModel& loss, const Regularizer& reg,
                                  const ErmParams& params, double tol = 1e-10);

// max over edges (p, j) of ||f_p - f_j||; zero at consensus.
double consensus_residual(const std::vector<Eigen::VectorXd>& classifiers,
                          const NetworkGraph& graph);

// Random initial states: f_p(0) = init_scale * standard normal vector from
// the (seed, init, node, 0) stream, lambda_p(0) = 0.
std::vector<NodeState> initial_states(const PartitionedDataset& partitioned,
                                      const AdmmConfig& config,
                                      std::uint64_t seed);

// (c_r / B_p) sum_i L(y_i f.x_i): the loss part of the local objective.
double node_empirical_loss(const Eigen::VectorXd& f, const NodeDataset& dataset,
                           const LossModel& loss, const ErmParams& params);

}  // namespace dpadmm

#endif  // DPADMM_ADMM_HPP
