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

#ifndef DPADMM_ANALYSIS_HPP
#define DPADMM_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dpadmm/admm.hpp"
#include "dpadmm/dvp.hpp"
#include "dpadmm/pvp.hpp"

namespace dpadmm {

// Inputs shared by the sample-complexity calculators. The beta constants are
// unspecified multiplicative constants; the calculators are comparative
// tools, not absolute sample counts. c_b defaults to c_r (set it to override
// the third full-perturbation term separately).
struct BoundInputs {
  double norm_f0 = 1.0;    // bound on the reference classifier norm
  double alpha_acc = 0.1;  // generalization slack
  double delta = 0.05;     // confidence
  double c_r = 1.0;
  double rho = 1.0;
  double eta = 1.0;
  int n_p = 1;
  int d = 1;
  double c1 = 0.25;
  double beta = 1.0;
  double c_b = -1.0;  // negative means: use c_r
};

// Minimum sample count for the non-private run to be alpha_acc-accurate
// with confidence 1 - delta.
double bound_nonprivate(const BoundInputs& inputs);

// Same for the dual-perturbed run; alpha_min is the smallest privacy
// parameter over the schedule (the max over iterations collapses onto it).
double bound_dvp(const BoundInputs& inputs, double alpha_min);

// Intermediate-iteration bound for the primal-perturbed run (unreleased f).
double bound_pvp_intermediate(const BoundInputs& inputs, double alpha_min);

// Full bound for the released perturbed variable V.
double bound_pvp_full(const BoundInputs& inputs, double alpha_min);

// Shared shape of the Monte Carlo lemma checkers' output.
struct LemmaReport {
  std::string name;
  double bound = 0.0;         // the objective-gap bound being tested
  double frequency = 0.0;     // fraction of trials satisfying it
  double required = 0.0;      // 1 - delta - 2 sqrt(delta (1-delta) / trials)
  int trials = 0;
  int violations = 0;
  bool pass = false;
};

// Instance the lemma checkers run on. eta and n_p enter the perturbed
// objectives; the graph itself is not needed.
struct LemmaInstance {
  NodeDataset dataset;
  ErmParams erm;
  double eta = 1.0;
  int n_p = 2;
  double inner_tol = 1e-10;
};

// Objective-gap bound of the dual mechanism (requires the phi = 0 regime):
// Z(f_eps*) <= Z(f*) + 16 d^2 ln(d/delta)^2 / (rho B^2 alpha^2), checked over
// `trials` independent noise draws.
LemmaReport check_lemma8(const LemmaInstance& instance, const LossModel& loss,
                         const Regularizer& reg, double alpha, double delta,
                         int trials, std::uint64_t seed);

// Objective-gap bound of the primal mechanism's compensated minimization:
// gap <= 16 c_r^2 eta^2 n_p^2 d^2 ln(d/delta)^2 / (rho^3 B^2 alpha^2).
LemmaReport check_lemma11(const LemmaInstance& instance, const LossModel& loss,
                          const Regularizer& reg, double alpha, double delta,
                          int trials, std::uint64_t seed);

// Gap between the released V and the minimizer under the perturbed
// objective: gap <= 4 c_r^2 d^2 (rho tau + c4 c_r) ln(d/delta)^2
// / (rho^2 B^2 alpha^2), tau from the regularizer's Hessian bound.
LemmaReport check_lemma12(const LemmaInstance& instance, const LossModel& loss,
                          const Regularizer& reg, double alpha, double delta,
                          int trials, std::uint64_t seed);

struct AuditConfig {
  int runs = 100000;
  int bins = 40;
  double slack = 0.2;   // allowed estimator overshoot over alpha
  int min_count = 100;  // bins below this are merged before comparison
};

enum class AuditMechanism { kDvp, kPvp };

struct AuditReport {
  std::string mechanism;
  double alpha = 0.0;
  double epsilon_hat = 0.0;
  int merged_bins = 0;
  int runs = 0;
  bool merged_warning = false;  // some raw bins fell below min_count
};

// Empirical per-iteration privacy estimate for a single node and a single
// mechanism round, restricted to d = 1. Histograms the released scalar under
// the dataset and its neighbor and reports the worst log count ratio over
// occupancy-merged bins.
AuditReport audit_privacy(AuditMechanism mechanism, const NodeDataset& dataset,
                          int neighbor_index, const DataPoint& replacement,
                          double alpha, const ErmParams& erm, double eta,
                          ZetaRule rule, const AuditConfig& audit,
                          std::uint64_t seed);

// Suboptimality of the node-average classifier at iteration t, measured by
// the centralized objective against the final iterate. Requires the trace to
// have converged (final residual <= residual_tol).
double measure_gap(const RunTrace& trace, const PartitionedDataset& partitioned,
                   const LossModel& loss, const Regularizer& reg,
                   const ErmParams& params, int t, double residual_tol = 1e-3);

}  // namespace dpadmm

#endif  // DPADMM_ANALYSIS_HPP
