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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dpadmm/analysis.hpp"
#include "dpadmm/experiments.hpp"
#include "testutil.hpp"

using namespace dpadmm;

namespace {

const LossModel kLoss = logistic_loss();
const Regularizer kReg = l2_regularizer();

BoundInputs random_inputs(std::uint64_t seed) {
  CounterRng rng = CounterRng::derive(seed, StreamPurpose::kSynthetic, 55, 0);
  BoundInputs in;
  in.norm_f0 = 0.5 + 2.0 * rng.next_unit();
  in.alpha_acc = 0.05 + 0.5 * rng.next_unit();
  in.delta = 0.01 + 0.4 * rng.next_unit();
  in.c_r = 0.5 + 5.0 * rng.next_unit();
  in.rho = 0.1 + rng.next_unit();
  in.eta = 0.5 + rng.next_unit();
  in.n_p = 1 + static_cast<int>(rng.next_u64() % 4);
  in.d = 2 + static_cast<int>(rng.next_u64() % 8);
  in.c1 = 0.25;
  return in;
}

}  // namespace

TEST_CASE("non-private bound closed form") {
  BoundInputs in;
  in.norm_f0 = 1.0;
  in.alpha_acc = 0.1;
  in.delta = std::exp(-1.0);
  in.c_r = 1.0;
  CHECK(bound_nonprivate(in) == doctest::Approx(100.0));

  in.alpha_acc = 0.05;  // halving the slack quadruples the bound
  CHECK(bound_nonprivate(in) == doctest::Approx(400.0));

  in.alpha_acc = 0.1;
  in.delta = 0.999999;
  CHECK(bound_nonprivate(in) <= 1e-3);  // ln(1/delta) -> 0
}

TEST_CASE("dvp bound equals the max of three independently computed terms") {
  for (int trial = 0; trial < 30; ++trial) {
    const BoundInputs in = random_inputs(trial);
    const double alpha = 0.05 + 0.001 * trial;
    const double t1 = in.norm_f0 * in.d * std::log(in.d / in.delta) /
                      (in.alpha_acc * alpha);
    const double t2 =
        in.c_r * in.c1 * in.norm_f0 * in.norm_f0 / (in.alpha_acc * alpha);
    const double t3 = in.c_r * in.norm_f0 * in.norm_f0 *
                      std::log(1.0 / in.delta) / (in.alpha_acc * in.alpha_acc);
    CHECK(bound_dvp(in, alpha) ==
          doctest::Approx(std::max({t1, t2, t3})).epsilon(1e-12));
  }
}

TEST_CASE("dvp bound tie condition") {
  // choose c1 so the second and third terms tie, then norm_f0 so the first
  // joins; all three must then coincide with the returned max
  BoundInputs in;
  in.d = 3;
  in.delta = 0.1;
  in.alpha_acc = 0.4;
  in.c_r = 1.0;
  const double alpha = 0.2;
  in.c1 = alpha * std::log(1.0 / in.delta) / in.alpha_acc;
  in.norm_f0 = in.d * std::log(in.d / in.delta) / (in.c_r * in.c1);
  const double t1 =
      in.norm_f0 * in.d * std::log(in.d / in.delta) / (in.alpha_acc * alpha);
  const double t2 = in.c_r * in.c1 * in.norm_f0 * in.norm_f0 / (in.alpha_acc * alpha);
  const double t3 = in.c_r * in.norm_f0 * in.norm_f0 * std::log(1.0 / in.delta) /
                    (in.alpha_acc * in.alpha_acc);
  CHECK(t1 == doctest::Approx(t2).epsilon(1e-9));
  CHECK(t2 == doctest::Approx(t3).epsilon(1e-9));
  CHECK(bound_dvp(in, alpha) == doctest::Approx(t1).epsilon(1e-9));
}

TEST_CASE("dvp bound asymptotics in d") {
  BoundInputs in = random_inputs(77);
  in.d = 4;
  const double small_d = bound_dvp(in, 0.1);
  in.d = 4000;
  const double big_d = bound_dvp(in, 0.1);
  // first term grows like d ln d and eventually dominates
  const double expected = in.beta * in.norm_f0 * in.d * std::log(in.d / in.delta) /
                          (in.alpha_acc * 0.1);
  CHECK(big_d == doctest::Approx(expected));
  CHECK(big_d > small_d);
}

TEST_CASE("pvp intermediate bound") {
  for (int trial = 0; trial < 20; ++trial) {
    const BoundInputs in = random_inputs(100 + trial);
    const double alpha = 0.1;
    const double f3 = std::pow(in.norm_f0, 3);
    const double t1 = in.c_r * f3 * in.eta * in.n_p * in.d *
                      std::log(in.d / in.delta) /
                      (in.alpha_acc * in.alpha_acc * alpha);
    const double t2 = in.c_r * in.norm_f0 * in.norm_f0 *
                      std::log(1.0 / in.delta) / (in.alpha_acc * in.alpha_acc);
    CHECK(bound_pvp_intermediate(in, alpha) ==
          doctest::Approx(std::max(t1, t2)).epsilon(1e-12));
  }
  // linear growth in the neighbor count once the first term dominates
  BoundInputs in = random_inputs(300);
  in.n_p = 2;
  in.norm_f0 = 3.0;
  const double base = bound_pvp_intermediate(in, 0.05);
  in.n_p = 4;
  CHECK(bound_pvp_intermediate(in, 0.05) == doctest::Approx(2.0 * base));
}

TEST_CASE("pvp full bound") {
  for (int trial = 0; trial < 20; ++trial) {
    const BoundInputs in = random_inputs(400 + trial);
    const double alpha = 0.07;
    const double log_dd = std::log(in.d / in.delta);
    const double f3 = std::pow(in.norm_f0, 3);
    const double t1 = in.c_r * f3 * in.eta * in.n_p * in.d * log_dd /
                      (in.alpha_acc * in.alpha_acc * alpha);
    const double t2 = in.c_r * in.norm_f0 * in.norm_f0 *
                      std::log(1.0 / in.delta) / (in.alpha_acc * in.alpha_acc);
    const double t3 = 4.0 * in.c_r * in.norm_f0 * in.d * log_dd * log_dd /
                      (in.alpha_acc * alpha);
    const double t4 = 4.0 * f3 * in.eta * in.n_p * in.d * log_dd /
                      (in.alpha_acc * in.alpha_acc * alpha);
    const double t5 = 4.0 * std::pow(in.c_r, 1.5) * in.norm_f0 * in.norm_f0 *
                      in.d * log_dd / (std::pow(in.alpha_acc, 1.5) * alpha);
    CHECK(bound_pvp_full(in, alpha) ==
          doctest::Approx(std::max({t1, t2, t3, t4, t5})).epsilon(1e-12));
    // never below the intermediate bound terms it extends
    CHECK(bound_pvp_full(in, alpha) >=
          bound_pvp_intermediate(in, alpha) - 1e-9);
  }

  // monotone nonincreasing in alpha
  const BoundInputs in = random_inputs(500);
  CHECK(bound_pvp_full(in, 0.05) >= bound_pvp_full(in, 0.1));
  CHECK(bound_pvp_full(in, 0.1) >= bound_pvp_full(in, 0.5));

  // the undefined third-term constant defaults to c_r but can be overridden
  BoundInputs override_cb = random_inputs(501);
  override_cb.alpha_acc = 0.9;  // let the third term dominate via c_b
  override_cb.norm_f0 = 0.1;
  override_cb.c_b = 1e6;
  const double log_dd = std::log(override_cb.d / override_cb.delta);
  const double t3 = 4.0 * 1e6 * override_cb.norm_f0 * override_cb.d * log_dd *
                    log_dd / (override_cb.alpha_acc * 0.1);
  CHECK(bound_pvp_full(override_cb, 0.1) == doctest::Approx(t3));
}

TEST_CASE("bound calculators are monotone in every argument") {
  for (int trial = 0; trial < 100; ++trial) {
    const BoundInputs in = random_inputs(1000 + trial);
    const double alpha = 0.05 + 0.3 * (trial % 7) / 7.0;
    auto all_bounds = [&](const BoundInputs& v, double a) {
      return std::vector<double>{bound_nonprivate(v), bound_dvp(v, a),
                                 bound_pvp_intermediate(v, a),
                                 bound_pvp_full(v, a)};
    };
    const auto base = all_bounds(in, alpha);

    BoundInputs up = in;
    up.norm_f0 *= 1.3;
    auto v = all_bounds(up, alpha);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] >= base[i] - 1e-12);

    up = in;
    up.c_r *= 1.4;
    v = all_bounds(up, alpha);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] >= base[i] - 1e-12);

    up = in;
    up.d += 3;
    v = all_bounds(up, alpha);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] >= base[i] - 1e-12);

    up = in;
    up.n_p += 2;
    v = all_bounds(up, alpha);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] >= base[i] - 1e-12);

    up = in;
    up.alpha_acc *= 1.2;
    v = all_bounds(up, alpha);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] <= base[i] + 1e-12);

    v = all_bounds(in, alpha * 1.5);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] <= base[i] + 1e-12);

    up = in;
    up.delta = std::min(0.9, in.delta * 1.5);
    v = all_bounds(up, alpha);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] <= base[i] + 1e-12);
  }
}

TEST_CASE("bound input validation") {
  BoundInputs bad;
  bad.delta = 1.5;
  CHECK_THROWS_AS(bound_nonprivate(bad), std::invalid_argument);
  bad = BoundInputs{};
  bad.rho = -1.0;
  CHECK_THROWS_AS(bound_dvp(bad, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bound_dvp(BoundInputs{}, 0.0), std::invalid_argument);
}

namespace {

LemmaInstance default_lemma_instance(double c_r) {
  LemmaInstance instance;
  instance.dataset = testutil::random_dataset(50, 3, 777);
  instance.erm = {c_r, 0.5};
  instance.eta = 1.0;
  instance.n_p = 2;
  return instance;
}

}  // namespace

TEST_CASE("lemma 8 checker") {
  const LemmaInstance instance = default_lemma_instance(1.0);
  // near-noiseless limit: alpha large -> zeta large -> gap ~ 0
  const LemmaReport easy =
      check_lemma8(instance, kLoss, kReg, 50.0, 0.05, 500, 1);
  CHECK(easy.frequency == 1.0);
  CHECK(easy.pass);

  // loose-delta variant
  const LemmaReport loose =
      check_lemma8(instance, kLoss, kReg, 0.5, 0.5, 1000, 2);
  CHECK(loose.pass);

  // phi > 0 regime is rejected
  LemmaInstance tight = instance;
  tight.erm.c_r = 50.0;  // B/C = 1 makes the log term large
  tight.erm.rho = 0.01;
  tight.eta = 0.001;
  CHECK_THROWS_AS(check_lemma8(tight, kLoss, kReg, 0.01, 0.05, 10, 3),
                  std::invalid_argument);
}

TEST_CASE("lemma 11 checker") {
  const LemmaInstance instance = default_lemma_instance(10.0);
  const LemmaReport easy =
      check_lemma11(instance, kLoss, kReg, 50.0, 0.05, 500, 4);
  CHECK(easy.frequency == 1.0);
  const LemmaReport loose =
      check_lemma11(instance, kLoss, kReg, 0.5, 0.5, 1000, 5);
  CHECK(loose.pass);
}

TEST_CASE("lemma 12 checker") {
  const LemmaInstance instance = default_lemma_instance(10.0);
  const LemmaReport easy =
      check_lemma12(instance, kLoss, kReg, 50.0, 0.05, 500, 6);
  CHECK(easy.frequency == 1.0);
  const LemmaReport loose =
      check_lemma12(instance, kLoss, kReg, 0.5, 0.5, 1000, 7);
  CHECK(loose.pass);
}

TEST_CASE("audit requires scalar outputs and rejects tiny run counts") {
  NodeDataset wide = testutil::random_dataset(20, 2, 901);
  AuditConfig audit;
  DataPoint repl{Eigen::VectorXd::Constant(2, 0.1), 1.0};
  CHECK_THROWS_AS(audit_privacy(AuditMechanism::kDvp, wide, 0, repl, 0.5,
                                {5.0, 0.5}, 1.0, ZetaRule::kProofHalf, audit, 1),
                  std::invalid_argument);
  NodeDataset narrow = testutil::random_dataset(20, 1, 902);
  DataPoint repl1{Eigen::VectorXd::Constant(1, 0.1), 1.0};
  audit.runs = 10;
  CHECK_THROWS_AS(audit_privacy(AuditMechanism::kDvp, narrow, 0, repl1, 0.5,
                                {5.0, 0.5}, 1.0, ZetaRule::kProofHalf, audit, 1),
                  std::invalid_argument);
}

TEST_CASE("audit control: identical datasets look identical") {
  NodeDataset ds = testutil::random_dataset(20, 1, 903);
  AuditConfig audit;
  audit.runs = 20000;
  audit.bins = 10;
  audit.min_count = 1500;
  // replacement equal to the original point: Hamming distance 0
  const AuditReport report =
      audit_privacy(AuditMechanism::kPvp, ds, 0, ds.points[0], 0.5, {5.0, 0.5},
                    1.0, ZetaRule::kProofHalf, audit, 11);
  CHECK(report.epsilon_hat <= 0.15);
  CHECK(report.merged_bins >= 2);
}

TEST_CASE("audit separates weak from strong privacy") {
  // ridge-dominated instance: the minimizer shift between the neighboring
  // datasets sits near the sensitivity bound, so the estimate scales with
  // alpha well above the estimator noise floor
  NodeDataset ds;
  ds.node_id = 1;
  for (int i = 0; i < 20; ++i) {
    const double v = (i % 2 ? 1.0 : -1.0);
    ds.points.push_back({Eigen::VectorXd::Constant(1, v * (0.3 + 0.03 * i)),
                         i < 10 ? 1.0 : -1.0});
  }
  AuditConfig audit;
  audit.runs = 20000;
  audit.bins = 14;
  audit.min_count = 1000;
  DataPoint repl{Eigen::VectorXd::Constant(1, -0.9), -1.0};
  const AuditReport weak =
      audit_privacy(AuditMechanism::kPvp, ds, 0, repl, 5.0, {18.0, 1.0}, 1.0,
                    ZetaRule::kProofHalf, audit, 13);
  const AuditReport strong =
      audit_privacy(AuditMechanism::kPvp, ds, 0, repl, 0.2, {18.0, 1.0}, 1.0,
                    ZetaRule::kProofHalf, audit, 13);
  // weaker privacy shows a visibly larger estimated ratio
  CHECK(weak.epsilon_hat > strong.epsilon_hat + 0.2);
  CHECK(strong.epsilon_hat <= 0.2 + audit.slack);
}

TEST_CASE("auditor is consistent when runs double") {
  NodeDataset ds = testutil::random_dataset(20, 1, 907);
  DataPoint repl{Eigen::VectorXd::Constant(1, -0.8), -1.0};
  AuditConfig small;
  small.runs = 20000;
  small.bins = 10;
  small.min_count = 1500;
  AuditConfig big = small;
  big.runs = 40000;
  const ErmParams erm{10.0, 1.0};
  const AuditReport at_small =
      audit_privacy(AuditMechanism::kDvp, ds, 3, repl, 0.5, erm, 1.0,
                    ZetaRule::kProofHalf, small, 17);
  const AuditReport at_big =
      audit_privacy(AuditMechanism::kDvp, ds, 3, repl, 0.5, erm, 1.0,
                    ZetaRule::kProofHalf, big, 17);
  // doubling the sample may move the estimate, but only within the binomial
  // confidence width of the occupancy floor
  const double width = 3.0 * std::sqrt(2.0 / small.min_count);
  CHECK(at_big.epsilon_hat <= at_small.epsilon_hat + width);
}

TEST_CASE("measure gap") {
  const auto points = make_synthetic_dataset(60, 2, 0.1, 905);
  const NetworkGraph ring = build_topology(TopologyKind::kRing, 3);
  const PartitionedDataset parts =
      partition(points, ring, PartitionStrategy::kEven, 905);
  AdmmConfig config;
  config.erm = {5.0, 0.5};
  config.max_iters = 120;
  const RunTrace trace = run_nonprivate(parts, ring, kLoss, kReg, config, 5);
  REQUIRE(trace.iterations.back().residual <= 1e-3);

  const double at_end = measure_gap(trace, parts, kLoss, kReg, config.erm,
                                    config.max_iters);
  CHECK(at_end == 0.0);
  const double at_start = measure_gap(trace, parts, kLoss, kReg, config.erm, 1);
  CHECK(at_start > 0.0);
  // monotone nonincreasing after burn-in
  double prev = measure_gap(trace, parts, kLoss, kReg, config.erm, 10);
  for (int t = 11; t <= config.max_iters; ++t) {
    const double g = measure_gap(trace, parts, kLoss, kReg, config.erm, t);
    CHECK(g <= prev + 1e-10);
    prev = g;
  }

  // non-converged traces are rejected
  AdmmConfig brief = config;
  brief.max_iters = 2;
  const RunTrace young = run_nonprivate(parts, ring, kLoss, kReg, brief, 5);
  CHECK_THROWS_AS(measure_gap(young, parts, kLoss, kReg, config.erm, 1, 1e-9),
                  std::runtime_error);
}
