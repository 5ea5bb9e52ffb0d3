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

#ifndef DPADMM_DVP_HPP
#define DPADMM_DVP_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dpadmm/admm.hpp"

namespace dpadmm {

// How the noise scale zeta is derived from alpha_hat. The privacy analysis
// supports alpha_hat / 2; the tighter alpha_hat variant is kept selectable
// for curve replication.
enum class ZetaRule { kProofHalf, kAlgorithmFull };

// Per-node, per-iteration parameters of the dual-perturbation mechanism.
struct DvpParams {
  double alpha = 0.0;      // requested privacy level
  double alpha_hat = 0.0;  // density-ratio budget left for the noise
  double phi = 0.0;        // extra ridge weight (else-branch only)
  double zeta = 0.0;       // noise scale
  ZetaRule rule = ZetaRule::kProofHalf;
  bool phi_clamped = false;     // else-branch formula went negative
  bool alpha_above_one = false; // outside the regime the analysis assumes
};

// Splits alpha between the curvature (Jacobian) budget and the noise budget:
// alpha_hat = alpha - ln(1 + c1 / ((b_p/c_r)(rho + 2 eta n_p)))^2; when that
// is not positive, a ridge phi restores enough curvature and alpha_hat
// falls back to alpha / 2.
DvpParams dvp_calibrate(double alpha, double c1, double b_p, double c_r,
                        double rho, double eta, int n_p,
                        ZetaRule rule = ZetaRule::kProofHalf);

// mu = lambda + c_r / (2 b_p) * noise.
Eigen::VectorXd perturb_dual(const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& noise, double c_r,
                             double b_p);

// argmin of the dual-perturbed consensus objective: local ERM term + rho R
// + 2 mu.f + phi/2 ||f||^2 + eta sum_i ||f - (f_p(t) + f_i(t)) / 2||^2.
Eigen::VectorXd primal_update_dvp(const NodeState& state,
                                  const std::vector<Eigen::VectorXd>& neighbor_primal,
                                  const NodeDataset& dataset,
                                  const LossModel& loss, const Regularizer& reg,
                                  const AdmmConfig& config,
                                  const DvpParams& params,
                                  const Eigen::VectorXd& mu);

// Inverts the stationarity condition of the dual-perturbed objective at
// f_opt, returning the unique noise vector that makes f_opt the minimizer.
// Exact only when f_opt was solved to tight tolerance.
Eigen::VectorXd kkt_recover_noise(const Eigen::VectorXd& f_opt,
                                  const NodeState& state_at_t,
                                  const std::vector<Eigen::VectorXd>& neighbor_primal,
                                  const NodeDataset& dataset,
                                  const LossModel& loss, const Regularizer& reg,
                                  const AdmmConfig& config,
                                  const DvpParams& params);

// alpha_p(t) schedule: one value per iteration, last value repeating; the
// same schedule applies to every node.
class AlphaSchedule {
 public:
  explicit AlphaSchedule(double constant) : values_{constant} {}
  explicit AlphaSchedule(std::vector<double> values);

  // t is the 0-based round index.
  double alpha(int t) const;

 private:
  std::vector<double> values_;
};

// Full dual-variable-perturbation run: per round, each node calibrates,
// draws noise, perturbs its dual into mu, minimizes, broadcasts the
// minimizer, and applies the usual dual update.
RunTrace run_dvp(const PartitionedDataset& partitioned, const NetworkGraph& graph,
                 const LossModel& loss, const Regularizer& reg,
                 const AdmmConfig& config, const AlphaSchedule& schedule,
                 ZetaRule rule, std::uint64_t seed);

}  // namespace dpadmm

#endif  // DPADMM_DVP_HPP
