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

#include "dpadmm/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace dpadmm {

namespace {

double logistic_value(double z) {
  // ln(1 + e^{-z}) = -z + ln(1 + e^{z}) for z < 0 keeps the exponent bounded.
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

double logistic_first(double z) {
  // L'(z) = -1 / (1 + e^{z})
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(z));
}

double logistic_second(double z) {
  // L''(z) = sigma(z) * sigma(-z) with sigma the logistic function.
  const double e = std::exp(-std::abs(z));
  const double s = e / (1.0 + e);
  return s * (1.0 - s);
}

double l2_value(const Eigen::VectorXd& f) { return 0.5 * f.squaredNorm(); }

Eigen::VectorXd l2_gradient(const Eigen::VectorXd& f) { return f; }

Eigen::MatrixXd l2_hessian(const Eigen::VectorXd& f) {
  return Eigen::MatrixXd::Identity(f.size(), f.size());
}

}  // namespace

LossModel logistic_loss() {
  LossModel m;
  m.name = "logistic";
  m.value = &logistic_value;
  m.first_derivative = &logistic_first;
  m.second_derivative = &logistic_second;
  m.c1 = 0.25;
  m.c4_lipschitz = 0.25;
  return m;
}

Regularizer l2_regularizer() {
  Regularizer r;
  r.name = "l2";
  r.value = &l2_value;
  r.gradient = &l2_gradient;
  r.hessian = &l2_hessian;
  r.hessian_bound = 1.0;
  return r;
}

LossModel loss_by_name(const std::string& name) {
  if (name == "logistic") return logistic_loss();
  throw std::invalid_argument("unknown loss: " + name);
}

Regularizer regularizer_by_name(const std::string& name) {
  if (name == "l2") return l2_regularizer();
  throw std::invalid_argument("unknown regularizer: " + name);
}

void validate_erm_params(const ErmParams& params, int min_node_size) {
  if (!(params.c_r > 0.0)) throw std::invalid_argument("ErmParams: c_r must be positive");
  if (!(params.rho > 0.0)) throw std::invalid_argument("ErmParams: rho must be positive");
  if (params.c_r > static_cast<double>(min_node_size)) {
    throw std::invalid_argument("ErmParams: c_r exceeds the smallest node sample count");
  }
}

double local_objective(const Eigen::VectorXd& f, const NodeDataset& dataset,
                       const LossModel& loss, const Regularizer& reg,
                       const ErmParams& params) {
  if (dataset.size() == 0) throw std::invalid_argument("local_objective: empty dataset");
  if (f.size() != dataset.dim()) {
    throw std::invalid_argument("local_objective: dimension mismatch");
  }
  double sum = 0.0;
  for (const auto& p : dataset.points) sum += loss.value(p.y * f.dot(p.x));
  return params.c_r / dataset.size() * sum + params.rho * reg.value(f);
}

Eigen::VectorXd local_gradient(const Eigen::VectorXd& f,
                               const NodeDataset& dataset,
                               const LossModel& loss, const Regularizer& reg,
                               const ErmParams& params) {
  if (dataset.size() == 0) throw std::invalid_argument("local_gradient: empty dataset");
  if (f.size() != dataset.dim()) {
    throw std::invalid_argument("local_gradient: dimension mismatch");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(f.size());
  for (const auto& p : dataset.points) {
    g += p.y * loss.first_derivative(p.y * f.dot(p.x)) * p.x;
  }
  return params.c_r / dataset.size() * g + params.rho * reg.gradient(f);
}

double centralized_objective(const Eigen::VectorXd& f,
                             const PartitionedDataset& partitioned,
                             const LossModel& loss, const Regularizer& reg,
                             const ErmParams& params) {
  if (partitioned.per_node.empty()) {
    throw std::invalid_argument("centralized_objective: no nodes");
  }
  const int b = partitioned.per_node.front().size();
  double sum = 0.0;
  for (const auto& node : partitioned.per_node) {
    if (node.size() != b) {
      throw std::invalid_argument(
          "centralized_objective: unequal node sample counts");
    }
    if (f.size() != node.dim()) {
      throw std::invalid_argument("centralized_objective: dimension mismatch");
    }
    for (const auto& p : node.points) sum += loss.value(p.y * f.dot(p.x));
  }
  return params.c_r / b * sum + params.rho * reg.value(f);
}

}  // namespace dpadmm
