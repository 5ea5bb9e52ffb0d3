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

#ifndef DPADMM_OBJECTIVE_HPP
#define DPADMM_OBJECTIVE_HPP

#include <string>

#include <Eigen/Core>

#include "dpadmm/dataset.hpp"

namespace dpadmm {

// Scalar margin loss L(z) with z = y * f.x, plus the two curvature
// constants the mechanism and bound calculus need: c1 bounds |L''| and
// c4_lipschitz is a Lipschitz constant of L'.
struct LossModel {
  std::string name;
  double (*value)(double) = nullptr;
  double (*first_derivative)(double) = nullptr;
  double (*second_derivative)(double) = nullptr;
  double c1 = 0.0;
  double c4_lipschitz = 0.0;
};

// 1-strongly convex regularizer R(f). hessian_bound is an upper bound on
// ||grad^2 R|| used by the primal-perturbation objective-gap bound.
struct Regularizer {
  std::string name;
  double (*value)(const Eigen::VectorXd&) = nullptr;
  Eigen::VectorXd (*gradient)(const Eigen::VectorXd&) = nullptr;
  Eigen::MatrixXd (*hessian)(const Eigen::VectorXd&) = nullptr;
  double hessian_bound = 1.0;
};

// Scalars of the regularized ERM objective: empirical weight c_r (must not
// exceed any node's sample count) and regularizer weight rho > 0.
struct ErmParams {
  double c_r = 1.0;
  double rho = 1.0;
};

// Logistic loss L(z) = ln(1 + e^{-z}), evaluated with a sign branch so large
// |z| neither overflows nor loses the linear tail. c1 = c4_lipschitz = 1/4.
LossModel logistic_loss();

// R(f) = ||f||^2 / 2.
Regularizer l2_regularizer();

LossModel loss_by_name(const std::string& name);
Regularizer regularizer_by_name(const std::string& name);

// Throws unless c_r > 0, rho > 0 and c_r <= B_p for the given node size.
void validate_erm_params(const ErmParams& params, int min_node_size);

// Per-node objective (c_r / B_p) sum_i L(y_i f.x_i) + rho R(f).
double local_objective(const Eigen::VectorXd& f, const NodeDataset& dataset,
                       const LossModel& loss, const Regularizer& reg,
                       const ErmParams& params);

// Analytic gradient of local_objective.
Eigen::VectorXd local_gradient(const Eigen::VectorXd& f,
                               const NodeDataset& dataset,
                               const LossModel& loss, const Regularizer& reg,
                               const ErmParams& params);

// Network objective (c_r / B_p) sum_p sum_i L + rho R(f). Requires equal
// per-node sample counts; the single B_p scaling is only meaningful for
// balanced partitions.
double centralized_objective(const Eigen::VectorXd& f,
                             const PartitionedDataset& partitioned,
                             const LossModel& loss, const Regularizer& reg,
                             const ErmParams& params);

}  // namespace dpadmm

#endif  // DPADMM_OBJECTIVE_HPP
