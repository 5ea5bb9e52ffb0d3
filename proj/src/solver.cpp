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

#include "dpadmm/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace dpadmm {

double NodeObjective::value(const Eigen::VectorXd& f) const {
  double sum = 0.0;
  for (const auto& p : *points) sum += loss->value(p.y * f.dot(p.x));
  double v = loss_scale * sum + rho * reg->value(f);
  if (linear.size() > 0) v += linear.dot(f);
  if (ridge != 0.0) v += 0.5 * ridge * f.squaredNorm();
  for (const auto& c : centers) v += eta * (f - c).squaredNorm();
  return v;
}

Eigen::VectorXd NodeObjective::gradient(const Eigen::VectorXd& f) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(f.size());
  for (const auto& p : *points) {
    g += p.y * loss->first_derivative(p.y * f.dot(p.x)) * p.x;
  }
  g *= loss_scale;
  g += rho * reg->gradient(f);
  if (linear.size() > 0) g += linear;
  if (ridge != 0.0) g += ridge * f;
  for (const auto& c : centers) g += 2.0 * eta * (f - c);
  return g;
}

Eigen::MatrixXd NodeObjective::hessian(const Eigen::VectorXd& f) const {
  const int d = static_cast<int>(f.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
  for (const auto& p : *points) {
    // y^2 = 1 for labels in {-1, +1}
    h += loss->second_derivative(p.y * f.dot(p.x)) * (p.x * p.x.transpose());
  }
  h *= loss_scale;
  h += rho * reg->hessian(f);
  const double diag = ridge + 2.0 * eta * static_cast<double>(centers.size());
  if (diag != 0.0) h.diagonal().array() += diag;
  return h;
}

NewtonResult minimize_newton(const NodeObjective& objective,
                             const Eigen::VectorXd& warm_start,
                             const NewtonOptions& options) {
  Eigen::VectorXd f = warm_start;
  double fv = objective.value(f);
  NewtonResult result;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    const Eigen::VectorXd g = objective.gradient(f);
    const double gnorm = g.norm();
    if (gnorm <= options.tol) {
      result.f = f;
      result.grad_norm = gnorm;
      result.iterations = iter;
      result.converged = true;
      return result;
    }

    Eigen::VectorXd direction;
    const Eigen::MatrixXd h = objective.hessian(f);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() == Eigen::Success) direction = -llt.solve(g);
    if (direction.size() == 0 || g.dot(direction) >= 0.0) direction = -g;

    // Armijo backtracking. The rounding allowance keeps full Newton steps
    // acceptable once the decrement shrinks below representable decrease.
    const double slope = g.dot(direction);
    const double rounding = 8.0 * std::numeric_limits<double>::epsilon() *
                            (std::abs(fv) + 1.0);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd candidate = f + step * direction;
      if (candidate == f) break;  // step fell below representable resolution
      const double cv = objective.value(candidate);
      if (cv <= fv + 1e-4 * step * slope + rounding) {
        f = candidate;
        fv = cv;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // The value test says nothing once decrements fall below rounding;
      // take the full step if it reduces the stationarity measure instead.
      const Eigen::VectorXd candidate = f + direction;
      const double candidate_gnorm = objective.gradient(candidate).norm();
      if (candidate_gnorm <= 0.5 * gnorm || candidate_gnorm <= options.tol) {
        f = candidate;
        fv = objective.value(f);
        accepted = true;
      }
    }
    if (!accepted) {
      if (gnorm <= options.tol * 10.0) {
        result.f = f;
        result.grad_norm = gnorm;
        result.iterations = iter;
        result.converged = true;
        return result;
      }
      char msg[64];
      std::snprintf(msg, sizeof(msg), "%.3e", gnorm);
      throw std::runtime_error(
          std::string("minimize_newton: line search failed (grad norm ") + msg +
          ")");
    }
  }
  const double gnorm = objective.gradient(f).norm();
  if (gnorm <= options.tol) {
    result.f = f;
    result.grad_norm = gnorm;
    result.iterations = options.max_iters;
    result.converged = true;
    return result;
  }
  char msg[64];
  std::snprintf(msg, sizeof(msg), "%.3e", gnorm);
  throw std::runtime_error(
      std::string("minimize_newton: no convergence within iteration budget "
                  "(grad norm ") +
      msg + ")");
}

}  // namespace dpadmm
