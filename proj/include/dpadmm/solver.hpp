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

#ifndef DPADMM_SOLVER_HPP
#define DPADMM_SOLVER_HPP

#include <vector>

#include <Eigen/Core>

#include "dpadmm/objective.hpp"

namespace dpadmm {

// The composite objective every per-node update minimizes:
//
//   loss_scale * sum_i L(y_i f.x_i) + rho R(f) + linear.f
//     + ridge/2 ||f||^2 + eta * sum_k ||f - centers[k]||^2
//
// Setting linear = 2 lambda recovers the plain consensus update; linear =
// 2 mu plus a ridge recovers the dual-perturbed one; shifted centers recover
// the primal-perturbed one. The centralized problem pools all points with
// loss_scale = c_r / B_p.
struct NodeObjective {
  const std::vector<DataPoint>* points = nullptr;
  const LossModel* loss = nullptr;
  const Regularizer* reg = nullptr;
  double loss_scale = 1.0;
  double rho = 1.0;
  Eigen::VectorXd linear;
  double ridge = 0.0;
  double eta = 0.0;
  std::vector<Eigen::VectorXd> centers;

  double value(const Eigen::VectorXd& f) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& f) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& f) const;
};

struct NewtonOptions {
  double tol = 1e-8;       // gradient-norm stopping threshold
  int max_iters = 200;
};

struct NewtonResult {
  Eigen::VectorXd f;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton with Armijo backtracking; falls back to a gradient step when
// the Hessian factorization fails or the Newton direction is not a descent
// direction. Throws on non-convergence within the iteration budget.
NewtonResult minimize_newton(const NodeObjective& objective,
                             const Eigen::VectorXd& warm_start,
                             const NewtonOptions& options = {});

}  // namespace dpadmm

#endif  // DPADMM_SOLVER_HPP
