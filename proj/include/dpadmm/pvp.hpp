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

#ifndef DPADMM_PVP_HPP
#define DPADMM_PVP_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dpadmm/dvp.hpp"

namespace dpadmm {

// Per-node parameters of the primal-perturbation mechanism.
struct PvpParams {
  double alpha = 0.0;
  double zeta = 0.0;
  int t_stop = 1;  // round after which the single protected final round runs
};

// zeta = rho * b_p * alpha / (2 c_r), calibrated to the strong-convexity
// sensitivity of the per-node minimizer.
double pvp_zeta(double rho, double b_p, double alpha, double c_r);

// Worst-case minimizer shift between neighboring datasets: 2 c_r / (rho b_p).
double pvp_sensitivity_bound(double c_r, double rho, double b_p);

// argmin of the noise-compensated consensus objective: local ERM term +
// rho R + 2 lambda.f + eta sum_i ||f - (f_p(t) + V_i(t) - eps_p(t)) / 2||^2,
// where eps_p(t) is the noise this node added to its own broadcast last
// round (state.last_noise).
Eigen::VectorXd primal_update_pvp(const NodeState& state,
                                  const std::vector<Eigen::VectorXd>& neighbor_v,
                                  const NodeDataset& dataset,
                                  const LossModel& loss, const Regularizer& reg,
                                  const AdmmConfig& config);

// V = f + noise; V is the only primal quantity ever broadcast before the
// final round.
Eigen::VectorXd perturb_primal(const Eigen::VectorXd& f_new,
                               const Eigen::VectorXd& noise);

// lambda(t+1) = lambda(t) + eta/2 * sum_j (V_own - V_j).
Eigen::VectorXd dual_update_pvp(const Eigen::VectorXd& lambda,
                                const Eigen::VectorXd& own_v,
                                const std::vector<Eigen::VectorXd>& neighbor_v,
                                double eta);

// Primal-variable-perturbation run: rounds 1..t_stop broadcast perturbed
// V_p only; round t_stop + 1 is a single dual-perturbation round seeded with
// the latest own primals, duals and received V's, and its minimizer is the
// final output. Requires 1 <= t_stop < config.max_iters.
RunTrace run_pvp(const PartitionedDataset& partitioned, const NetworkGraph& graph,
                 const LossModel& loss, const Regularizer& reg,
                 const AdmmConfig& config, const AlphaSchedule& schedule,
                 int t_stop, ZetaRule final_round_rule, std::uint64_t seed);

}  // namespace dpadmm

#endif  // DPADMM_PVP_HPP
