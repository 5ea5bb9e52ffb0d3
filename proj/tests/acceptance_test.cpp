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

// End-to-end verification suite. Each criterion prints exactly one
// [PASS]/[FAIL] line; the exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "dpadmm/analysis.hpp"
#include "dpadmm/experiments.hpp"
#include "dpadmm/noise.hpp"
#include "testutil.hpp"

using namespace dpadmm;

namespace {

const LossModel kLoss = logistic_loss();
const Regularizer kReg = l2_regularizer();

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// Shared acceptance instance: ring of 4 nodes, d = 5, 50 points per node.
struct Instance {
  std::vector<DataPoint> points = make_synthetic_dataset(200, 5, 0.05, 2026);
  NetworkGraph ring = build_topology(TopologyKind::kRing, 4);
  AdmmConfig config;

  Instance() {
    config.erm = {10.0, 0.5};
    config.eta = 1.0;
    config.inner_tol = 1e-8;
    config.max_iters = 100;
  }

  PartitionedDataset parts(std::uint64_t seed) const {
    return partition(points, ring, PartitionStrategy::kEven, seed);
  }
};

void criterion1_oracle_equivalence(const Instance& inst) {
  const auto start = std::chrono::steady_clock::now();
  AdmmConfig config = inst.config;
  config.max_iters = 500;
  const PartitionedDataset parts = inst.parts(1);
  const RunTrace trace =
      run_nonprivate(parts, inst.ring, kLoss, kReg, config, 1);
  // At consensus the distributed problem carries one rho R(f) per node, so
  // the matching centralized problem weights the regularizer by P.
  const ErmParams central{config.erm.c_r, 4.0 * config.erm.rho};
  const Eigen::VectorXd oracle =
      centralized_solve(parts, kLoss, kReg, central, 1e-10);

  const double residual = trace.iterations.back().residual;
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(5);
  for (const auto& node : trace.iterations.back().nodes) avg += node.f;
  avg /= 4.0;
  const double z_avg = centralized_objective(avg, parts, kLoss, kReg, central);
  const double z_star = centralized_objective(oracle, parts, kLoss, kReg, central);
  const double rel_gap = std::abs(z_avg - z_star) / std::abs(z_star);
  const double elapsed = seconds_since(start);

  const bool pass = residual <= 1e-4 && rel_gap <= 1e-3 && elapsed < 10.0;
  report(1, "oracle equivalence", pass,
         fmt("residual=%.3g rel_gap=%.3g time=%.2fs", residual, rel_gap, elapsed));
}

void criterion2_kkt_roundtrip() {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    CounterRng rng = CounterRng::derive(4000 + trial, StreamPurpose::kSynthetic, 1, 0);
    const int d = 1 + static_cast<int>(rng.next_u64() % 5);
    const int b = 5 + static_cast<int>(rng.next_u64() % 26);
    const int n_p = static_cast<int>(rng.next_u64() % 4);
    const NodeDataset ds = testutil::random_dataset(b, d, 5000 + trial);
    AdmmConfig config;
    config.erm = {1.0 + 3.0 * rng.next_unit(), 0.2 + rng.next_unit()};
    config.inner_tol = 1e-10;
    config.inner_max_iters = 500;
    NodeState state;
    state.f = testutil::random_vector(d, 6000 + trial, 0.3);
    state.lambda = testutil::random_vector(d, 7000 + trial, 0.3);
    std::vector<Eigen::VectorXd> neighbors;
    for (int j = 0; j < n_p; ++j) {
      neighbors.push_back(testutil::random_vector(d, 8000 + 10 * trial + j, 0.3));
    }
    const double alpha = 0.05 + 0.85 * rng.next_unit();
    const DvpParams params =
        dvp_calibrate(alpha, kLoss.c1, b, config.erm.c_r, config.erm.rho,
                      config.eta, n_p);
    NoiseSpec spec;
    spec.dim = d;
    spec.zeta = params.zeta;
    spec.stream = CounterRng(rng.next_u64());
    const Eigen::VectorXd eps = sample_noise(spec);
    const Eigen::VectorXd mu =
        perturb_dual(state.lambda, eps, config.erm.c_r, b);
    const Eigen::VectorXd f =
        primal_update_dvp(state, neighbors, ds, kLoss, kReg, config, params, mu);
    const Eigen::VectorXd recovered =
        kkt_recover_noise(f, state, neighbors, ds, kLoss, kReg, config, params);
    worst = std::max(worst, (recovered - eps).cwiseAbs().maxCoeff());
  }
  report(2, "kkt noise round-trip", worst <= 1e-6,
         fmt("max_abs_err=%.3g over 100 instances", worst));
}

void criterion3_sensitivity_bounds() {
  // dual route: recovered-noise shift between neighboring datasets
  double worst_dvp = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng = CounterRng::derive(9000 + trial, StreamPurpose::kSynthetic, 2, 0);
    const int d = 1 + static_cast<int>(rng.next_u64() % 5);
    const int b = 10 + static_cast<int>(rng.next_u64() % 21);
    const NodeDataset ds = testutil::random_dataset(b, d, 10000 + trial);
    AdmmConfig config;
    config.erm = {1.0 + 4.0 * rng.next_unit(), 0.2 + rng.next_unit()};
    NodeState state;
    state.f = testutil::random_vector(d, 11000 + trial, 0.3);
    state.lambda = testutil::random_vector(d, 12000 + trial, 0.3);
    DvpParams params;  // phi = 0; the sensitivity is phi-independent
    const Eigen::VectorXd f_opt = testutil::random_vector(d, 13000 + trial, 0.6);

    DataPoint repl{testutil::random_vector(d, 14000 + trial, 0.5),
                   rng.next_unit() < 0.5 ? 1.0 : -1.0};
    if (repl.x.norm() > 1.0) repl.x /= repl.x.norm();
    const int index = static_cast<int>(rng.next_u64() % b);
    const NodeDataset other = neighboring_dataset(ds, index, repl);

    const Eigen::VectorXd eps_a =
        kkt_recover_noise(f_opt, state, {}, ds, kLoss, kReg, config, params);
    const Eigen::VectorXd eps_b =
        kkt_recover_noise(f_opt, state, {}, other, kLoss, kReg, config, params);
    worst_dvp = std::max(worst_dvp, (eps_a - eps_b).norm());
  }

  // primal route: argmin shift under identical noise and state
  double worst_pvp_margin = 0.0;  // max of (shift - bound); must stay <= 1e-6
  for (int trial = 0; trial < 200; ++trial) {
    CounterRng rng = CounterRng::derive(15000 + trial, StreamPurpose::kSynthetic, 3, 0);
    const int d = 1 + static_cast<int>(rng.next_u64() % 5);
    const int b = 10 + static_cast<int>(rng.next_u64() % 41);
    const NodeDataset ds = testutil::random_dataset(b, d, 16000 + trial);
    AdmmConfig config;
    config.erm = {1.0 + 4.0 * rng.next_unit(), 0.2 + 0.8 * rng.next_unit()};
    config.inner_tol = 1e-11;
    NodeState state;
    state.f = testutil::random_vector(d, 17000 + trial, 0.3);
    state.lambda = testutil::random_vector(d, 18000 + trial, 0.3);
    state.last_noise = testutil::random_vector(d, 19000 + trial, 0.4);
    const std::vector<Eigen::VectorXd> vs = {
        testutil::random_vector(d, 20000 + trial, 0.3)};

    DataPoint repl{testutil::random_vector(d, 21000 + trial, 0.5),
                   rng.next_unit() < 0.5 ? 1.0 : -1.0};
    if (repl.x.norm() > 1.0) repl.x /= repl.x.norm();
    const NodeDataset other =
        neighboring_dataset(ds, static_cast<int>(rng.next_u64() % b), repl);

    const Eigen::VectorXd fa = primal_update_pvp(state, vs, ds, kLoss, kReg, config);
    const Eigen::VectorXd fb =
        primal_update_pvp(state, vs, other, kLoss, kReg, config);
    const double bound =
        pvp_sensitivity_bound(config.erm.c_r, config.erm.rho, b);
    worst_pvp_margin = std::max(worst_pvp_margin, (fa - fb).norm() - bound);
  }

  const bool pass = worst_dvp <= 2.0 && worst_pvp_margin <= 1e-6;
  report(3, "sensitivity bounds", pass,
         fmt("max||eps'-eps||=%.4f (<=2), max argmin overshoot=%.3g (<=1e-6)",
             worst_dvp, worst_pvp_margin));
}

void criterion4_noise_law() {
  const auto start = std::chrono::steady_clock::now();
  const int n = 100000;
  bool pass = true;
  std::string detail;

  for (int d : {1, 3, 10}) {
    const double zeta = 0.8;
    std::vector<double> norms(n);
    double sum = 0.0;
    for (int r = 0; r < n; ++r) {
      NoiseSpec spec;
      spec.dim = d;
      spec.zeta = zeta;
      spec.stream = CounterRng::derive(30000 + d, StreamPurpose::kMechanism, 1, r);
      norms[r] = sample_noise(spec).norm();
      sum += norms[r];
    }
    const double mean = sum / n;
    const double expected = d / zeta;
    const double rel_err = std::abs(mean - expected) / expected;
    std::sort(norms.begin(), norms.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double cdf = gamma_cdf_int(d, 1.0 / zeta, norms[i]);
      ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
      ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    }
    if (rel_err > 0.02 || ks > 0.01) pass = false;
    detail += fmt("d=%d rel_err=%.4f ks=%.4f; ", d, rel_err, ks);
  }

  // tail-bound coverage grid; the k = 1 cells sit exactly on the boundary,
  // so a 3-sigma binomial allowance applies to the empirical frequency
  for (int k : {1, 3, 10}) {
    for (double delta : {0.2, 0.05, 0.01}) {
      const double threshold = gamma_tail_threshold(k, 2.0, delta);
      CounterRng rng =
          CounterRng::derive(31000 + k, StreamPurpose::kMechanism, 2,
                             static_cast<std::uint64_t>(delta * 1000));
      int below = 0;
      for (int r = 0; r < n; ++r) {
        if (rng.gamma_int(k, 2.0) < threshold) ++below;
      }
      const double freq = static_cast<double>(below) / n;
      const double slack = 3.0 * std::sqrt(delta * (1.0 - delta) / n);
      if (freq < 1.0 - delta - slack) {
        pass = false;
        detail += fmt("k=%d delta=%.2f freq=%.4f LOW; ", k, delta, freq);
      }
    }
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= 30.0) pass = false;
  report(4, "noise law", pass, detail + fmt("time=%.1fs", elapsed));
}

void criterion5_dp_audit() {
  // fixed neighboring pair: flip one point's position and label
  NodeDataset ds;
  ds.node_id = 1;
  for (int i = 0; i < 20; ++i) {
    const double sign = i % 2 ? 1.0 : -1.0;
    ds.points.push_back({Eigen::VectorXd::Constant(1, sign * (0.25 + 0.035 * i)),
                         i < 10 ? 1.0 : -1.0});
  }
  const DataPoint replacement{Eigen::VectorXd::Constant(1, -0.95), -1.0};
  const ErmParams erm{10.0, 1.0};

  AuditConfig audit;
  audit.runs = 100000;
  audit.bins = 12;
  audit.min_count = 4000;
  audit.slack = 0.2;

  bool pass = true;
  std::string detail;
  double worst_cell_time = 0.0;
  for (const auto mech : {AuditMechanism::kDvp, AuditMechanism::kPvp}) {
    for (double alpha : {0.2, 0.5}) {
      const auto start = std::chrono::steady_clock::now();
      const AuditReport r =
          audit_privacy(mech, ds, 0, replacement, alpha, erm, 1.0,
                        ZetaRule::kProofHalf, audit, 778);
      const double cell_time = seconds_since(start);
      worst_cell_time = std::max(worst_cell_time, cell_time);
      if (r.epsilon_hat > alpha + audit.slack || cell_time >= 300.0) pass = false;
      detail += fmt("%s@%.1f:%.3f ", r.mechanism.c_str(), alpha, r.epsilon_hat);
    }
    // identical-dataset control
    const AuditReport control =
        audit_privacy(mech, ds, 0, ds.points[0], 0.5, erm, 1.0,
                      ZetaRule::kProofHalf, audit, 779);
    if (control.epsilon_hat > 0.1) pass = false;
    detail += fmt("%s-control:%.3f ", control.mechanism.c_str(),
                  control.epsilon_hat);
  }
  report(5, "empirical dp audit", pass,
         detail + fmt("max_cell_time=%.1fs", worst_cell_time));
}

void criterion6_mechanism_off(const Instance& inst) {
  const PartitionedDataset parts = inst.parts(1);
  AdmmConfig config = inst.config;
  const RunTrace clean = run_nonprivate(parts, inst.ring, kLoss, kReg, config, 1);
  const RunTrace dvp = run_dvp(parts, inst.ring, kLoss, kReg, config,
                               AlphaSchedule(1e6), ZetaRule::kProofHalf, 1);
  const RunTrace pvp = run_pvp(parts, inst.ring, kLoss, kReg, config,
                               AlphaSchedule(1e6), config.max_iters - 1,
                               ZetaRule::kProofHalf, 1);
  double worst = 0.0;
  for (int t = 0; t < config.max_iters; ++t) {
    for (int p = 0; p < 4; ++p) {
      const Eigen::VectorXd& base = clean.iterations[t].nodes[p].f;
      worst = std::max(worst,
                       (dvp.iterations[t].nodes[p].f - base).cwiseAbs().maxCoeff());
      worst = std::max(worst,
                       (pvp.iterations[t].nodes[p].f - base).cwiseAbs().maxCoeff());
    }
  }
  report(6, "mechanism-off limits", worst <= 1e-3,
         fmt("max deviation=%.3g at alpha=1e6", worst));
}

void criterion7_tradeoff_trend(const Instance& inst) {
  const std::vector<double> alphas = {0.01, 0.1, 0.5, 1.0};
  const int n_seeds = 20;
  const int t_obs = 100;

  std::vector<double> nonprivate_losses;
  for (int s = 1; s <= n_seeds; ++s) {
    const PartitionedDataset parts = inst.parts(s);
    const RunTrace trace =
        run_nonprivate(parts, inst.ring, kLoss, kReg, inst.config, s);
    double sum = 0.0;
    for (const auto& node : trace.iterations[t_obs - 1].nodes) {
      sum += node.empirical_loss;
    }
    nonprivate_losses.push_back(sum / 4.0);
  }
  const double nonprivate_mean =
      std::accumulate(nonprivate_losses.begin(), nonprivate_losses.end(), 0.0) /
      n_seeds;

  bool pass = true;
  std::string detail = fmt("nonpriv=%.3f ", nonprivate_mean);
  std::vector<double> dvp_at_01, pvp_at_01;
  for (const auto mech : {Mechanism::kDvp, Mechanism::kPvp}) {
    std::vector<double> means;
    for (double alpha : alphas) {
      double total = 0.0;
      for (int s = 1; s <= n_seeds; ++s) {
        const PartitionedDataset parts = inst.parts(s);
        RunTrace trace;
        if (mech == Mechanism::kDvp) {
          trace = run_dvp(parts, inst.ring, kLoss, kReg, inst.config,
                          AlphaSchedule(alpha), ZetaRule::kProofHalf, s);
        } else {
          AdmmConfig config = inst.config;
          config.max_iters = t_obs + 1;  // observe before the protected stop
          trace = run_pvp(parts, inst.ring, kLoss, kReg, config,
                          AlphaSchedule(alpha), t_obs, ZetaRule::kProofHalf, s);
        }
        double sum = 0.0;
        for (const auto& node : trace.iterations[t_obs - 1].nodes) {
          sum += node.empirical_loss;
        }
        const double run_loss = sum / 4.0;
        total += run_loss;
        if (alpha == 0.1) {
          (mech == Mechanism::kDvp ? dvp_at_01 : pvp_at_01).push_back(run_loss);
        }
      }
      means.push_back(total / n_seeds);
    }
    const double rho_s = spearman(alphas, means);
    const bool monotone = rho_s <= -0.8;
    bool above_nonprivate = true;
    for (double m : means) {
      if (m < nonprivate_mean) above_nonprivate = false;
    }
    if (!monotone || !above_nonprivate) pass = false;
    detail += fmt("%s spearman=%.2f means=[%.2f %.2f %.2f %.2f] ",
                  mech == Mechanism::kDvp ? "dvp" : "pvp", rho_s, means[0],
                  means[1], means[2], means[3]);
  }
  report(7, "tradeoff trend", pass, detail);

  // soft comparison: dual perturbation tends to be steadier than primal at
  // alpha = 0.1 (warning only, not a failure)
  auto deviations = [](const std::vector<double>& xs) {
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    std::vector<double> out;
    for (double x : xs) out.push_back((x - mean) * (x - mean));
    return out;
  };
  const double p = mann_whitney_less_p(deviations(dvp_at_01), deviations(pvp_at_01));
  std::printf("[%s]     soft check: dvp steadier than pvp at alpha=0.1 (p=%.3f)\n",
              p <= 0.1 ? "ok " : "WARN", p);
}

void criterion8_curve_fit(const Instance& inst) {
  // self-consistency on an exactly synthesized curve
  std::vector<SeriesPoint> synth;
  const double c6 = 0.1;
  for (double a = 0.02; a <= 0.3; a += 0.04) {
    synth.push_back({a, 0.2 * std::exp(-25.0 * a) + c6});
  }
  const TradeoffFit self_fit = fit_accuracy_curve(synth, c6);
  const bool self_ok =
      std::abs(self_fit.model.fit_c4 - 0.2) <= 0.05 * 0.2 &&
      std::abs(self_fit.model.fit_c5 - 25.0) <= 0.05 * 25.0;

  // fit on real mechanism output
  ExperimentConfig config;
  config.dataset = "synthetic:200:5:0.05:seed=2026";
  config.topology = "ring:4";
  config.mechanism = Mechanism::kDvp;
  config.alphas = {0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
  config.rho = inst.config.erm.rho;
  config.c_r = inst.config.erm.c_r;
  config.iterations = 40;
  config.seeds = {1, 2, 3};
  config.output_dir = "acceptance_out";
  const TradeoffFit real_fit = run_tradeoff_suite(config);

  const bool pass = self_ok && (real_fit.converged || real_fit.degenerate) &&
                    std::isfinite(real_fit.rmse);
  report(8, "curve-fit consistency", pass,
         fmt("recovered c4=%.4f c5=%.2f; real fit rmse=%.4f converged=%d",
             self_fit.model.fit_c4, self_fit.model.fit_c5, real_fit.rmse,
             real_fit.converged ? 1 : 0));
}

void criterion9_lemma_checkers() {
  const auto start = std::chrono::steady_clock::now();
  LemmaInstance instance;
  instance.dataset = testutil::random_dataset(50, 3, 424242);
  instance.erm = {1.0, 0.5};
  instance.eta = 1.0;
  instance.n_p = 2;

  const LemmaReport l8 =
      check_lemma8(instance, kLoss, kReg, 0.5, 0.05, 10000, 51);

  LemmaInstance wide = instance;
  wide.erm.c_r = 10.0;
  const LemmaReport l11 =
      check_lemma11(wide, kLoss, kReg, 0.5, 0.05, 10000, 52);
  const LemmaReport l12 =
      check_lemma12(wide, kLoss, kReg, 0.5, 0.05, 10000, 53);

  const double elapsed = seconds_since(start);
  const bool pass =
      l8.pass && l11.pass && l12.pass && elapsed < 3.0 * 120.0;
  report(9, "lemma checkers", pass,
         fmt("freq8=%.4f freq11=%.4f freq12=%.4f (need >= %.4f) time=%.1fs",
             l8.frequency, l11.frequency, l12.frequency, l8.required, elapsed));
}

void criterion10_bound_calculators() {
  BoundInputs hand;
  hand.norm_f0 = 1.0;
  hand.alpha_acc = 0.1;
  hand.delta = std::exp(-1.0);
  hand.c_r = 1.0;
  const double value = bound_nonprivate(hand);
  bool pass = std::abs(value - 100.0) <= 1e-9;

  // monotonicity under random perturbations
  for (int trial = 0; trial < 100 && pass; ++trial) {
    CounterRng rng = CounterRng::derive(700 + trial, StreamPurpose::kSynthetic, 4, 0);
    BoundInputs in;
    in.norm_f0 = 0.5 + 2.0 * rng.next_unit();
    in.alpha_acc = 0.05 + 0.5 * rng.next_unit();
    in.delta = 0.01 + 0.4 * rng.next_unit();
    in.c_r = 0.5 + 5.0 * rng.next_unit();
    in.rho = 0.1 + rng.next_unit();
    in.eta = 0.5 + rng.next_unit();
    in.n_p = 1 + static_cast<int>(rng.next_u64() % 4);
    in.d = 2 + static_cast<int>(rng.next_u64() % 8);
    const double alpha = 0.05 + 0.4 * rng.next_unit();
    auto bounds = [&](const BoundInputs& v, double a) {
      return std::vector<double>{bound_nonprivate(v), bound_dvp(v, a),
                                 bound_pvp_intermediate(v, a),
                                 bound_pvp_full(v, a)};
    };
    const auto base = bounds(in, alpha);
    BoundInputs up = in;
    up.norm_f0 *= 1.25;
    auto v = bounds(up, alpha);
    for (std::size_t i = 0; i < 4; ++i) pass = pass && v[i] >= base[i] - 1e-12;
    up = in;
    up.d += 2;
    v = bounds(up, alpha);
    for (std::size_t i = 0; i < 4; ++i) pass = pass && v[i] >= base[i] - 1e-12;
    up = in;
    up.alpha_acc *= 1.3;
    v = bounds(up, alpha);
    for (std::size_t i = 0; i < 4; ++i) pass = pass && v[i] <= base[i] + 1e-12;
    v = bounds(in, alpha * 1.4);
    for (std::size_t i = 0; i < 4; ++i) pass = pass && v[i] <= base[i] + 1e-12;
  }
  report(10, "bound calculators", pass,
         fmt("hand value=%.12g (expect 100), monotone grid ok=%d", value,
             pass ? 1 : 0));
}

}  // namespace

int main() {
  const Instance inst;
  criterion1_oracle_equivalence(inst);
  criterion2_kkt_roundtrip();
  criterion3_sensitivity_bounds();
  criterion4_noise_law();
  criterion5_dp_audit();
  criterion6_mechanism_off(inst);
  criterion7_tradeoff_trend(inst);
  criterion8_curve_fit(inst);
  criterion9_lemma_checkers();
  criterion10_bound_calculators();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  }
  return g_failures;
}
