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

#include "dpadmm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "dpadmm/noise.hpp"

namespace dpadmm {

namespace {

void validate_bound_inputs(const BoundInputs& in) {
  if (!(in.norm_f0 > 0.0) || !(in.alpha_acc > 0.0) || !(in.delta > 0.0) ||
      !(in.delta < 1.0) || !(in.c_r > 0.0) || !(in.rho > 0.0) ||
      !(in.eta > 0.0) || in.n_p < 0 || in.d < 1 || in.c1 < 0.0 ||
      !(in.beta > 0.0)) {
    throw std::invalid_argument("BoundInputs: domain violation");
  }
  if (in.alpha_acc > 1.0) {
    std::cerr << "BoundInputs: alpha_acc > 1 is outside the usual regime\n";
  }
}

double effective_c_b(const BoundInputs& in) {
  return in.c_b < 0.0 ? in.c_r : in.c_b;
}

double required_frequency(double delta, int trials) {
  return 1.0 - delta - 2.0 * std::sqrt(delta * (1.0 - delta) / trials);
}

NodeObjective base_objective(const LemmaInstance& instance,
                             const LossModel& loss, const Regularizer& reg) {
  NodeObjective objective;
  objective.points = &instance.dataset.points;
  objective.loss = &loss;
  objective.reg = &reg;
  objective.loss_scale = instance.erm.c_r / instance.dataset.size();
  objective.rho = instance.erm.rho;
  return objective;
}

LemmaReport run_gap_trials(const std::string& name, const NodeObjective& base,
                           const LemmaInstance& instance, double bound,
                           double delta, int trials, std::uint64_t seed,
                           std::uint64_t lemma_id, int noise_vectors,
                           double zeta,
                           bool evaluate_at_v) {
  const int d = instance.dataset.dim();
  NewtonOptions options;
  options.tol = instance.inner_tol;
  options.max_iters = 500;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd f_star = minimize_newton(base, zero, options).f;
  const double z_star = base.value(f_star);

  int satisfied = 0;
  for (int trial = 0; trial < trials; ++trial) {
    CounterRng rng = CounterRng::derive(seed, StreamPurpose::kLemma, lemma_id,
                                        static_cast<std::uint64_t>(trial));
    NoiseSpec spec;
    spec.dim = d;
    spec.zeta = zeta;
    std::vector<Eigen::VectorXd> draws(noise_vectors);
    for (int k = 0; k < noise_vectors; ++k) {
      spec.stream = CounterRng(rng.next_u64());
      draws[k] = sample_noise(spec);
    }

    NodeObjective perturbed = base;
    double gap = 0.0;
    if (!evaluate_at_v) {
      if (noise_vectors == 1) {
        // Dual route: argmin of Z + (c_r / B) eps.f
        perturbed.linear =
            instance.erm.c_r / instance.dataset.size() * draws[0];
      } else {
        // Primal route: argmin of Z - eta sum_i (eps_p - eps_i).f
        Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
        for (int k = 1; k < noise_vectors; ++k) g += draws[0] - draws[k];
        perturbed.linear = -instance.eta * g;
      }
      const Eigen::VectorXd f_eps = minimize_newton(perturbed, f_star, options).f;
      gap = base.value(f_eps) - z_star;
    } else {
      // Released-variable route: evaluate the perturbed objective at
      // V = f_eps + eps_p versus at f_eps itself.
      Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
      for (int k = 1; k < noise_vectors; ++k) g += draws[0] - draws[k];
      perturbed.linear = -instance.eta * g;
      const Eigen::VectorXd f_eps = minimize_newton(perturbed, f_star, options).f;
      const Eigen::VectorXd v = f_eps + draws[0];
      gap = perturbed.value(v) - perturbed.value(f_eps);
    }
    if (gap <= bound) ++satisfied;
  }

  LemmaReport report;
  report.name = name;
  report.bound = bound;
  report.trials = trials;
  report.violations = trials - satisfied;
  report.frequency = static_cast<double>(satisfied) / trials;
  report.required = required_frequency(delta, trials);
  report.pass = report.frequency >= report.required;
  return report;
}

}  // namespace

double bound_nonprivate(const BoundInputs& in) {
  validate_bound_inputs(in);
  return in.beta * in.c_r * in.norm_f0 * in.norm_f0 * std::log(1.0 / in.delta) /
         (in.alpha_acc * in.alpha_acc);
}

double bound_dvp(const BoundInputs& in, double alpha_min) {
  validate_bound_inputs(in);
  if (!(alpha_min > 0.0)) throw std::invalid_argument("bound_dvp: alpha_min <= 0");
  const double t1 = in.norm_f0 * in.d * std::log(in.d / in.delta) /
                    (in.alpha_acc * alpha_min);
  const double t2 = in.c_r * in.c1 * in.norm_f0 * in.norm_f0 /
                    (in.alpha_acc * alpha_min);
  const double t3 = in.c_r * in.norm_f0 * in.norm_f0 * std::log(1.0 / in.delta) /
                    (in.alpha_acc * in.alpha_acc);
  return in.beta * std::max({t1, t2, t3});
}

double bound_pvp_intermediate(const BoundInputs& in, double alpha_min) {
  validate_bound_inputs(in);
  if (!(alpha_min > 0.0)) {
    throw std::invalid_argument("bound_pvp_intermediate: alpha_min <= 0");
  }
  const double f3 = in.norm_f0 * in.norm_f0 * in.norm_f0;
  const double t1 = in.c_r * f3 * in.eta * in.n_p * in.d *
                    std::log(in.d / in.delta) /
                    (in.alpha_acc * in.alpha_acc * alpha_min);
  const double t2 = in.c_r * in.norm_f0 * in.norm_f0 * std::log(1.0 / in.delta) /
                    (in.alpha_acc * in.alpha_acc);
  return in.beta * std::max(t1, t2);
}

double bound_pvp_full(const BoundInputs& in, double alpha_min) {
  validate_bound_inputs(in);
  if (!(alpha_min > 0.0)) {
    throw std::invalid_argument("bound_pvp_full: alpha_min <= 0");
  }
  const double log_dd = std::log(in.d / in.delta);
  const double f3 = in.norm_f0 * in.norm_f0 * in.norm_f0;
  const double t1 = in.c_r * f3 * in.eta * in.n_p * in.d * log_dd /
                    (in.alpha_acc * in.alpha_acc * alpha_min);
  const double t2 = in.c_r * in.norm_f0 * in.norm_f0 * std::log(1.0 / in.delta) /
                    (in.alpha_acc * in.alpha_acc);
  const double t3 = 4.0 * effective_c_b(in) * in.norm_f0 * in.d * log_dd * log_dd /
                    (in.alpha_acc * alpha_min);
  const double t4 = 4.0 * f3 * in.eta * in.n_p * in.d * log_dd /
                    (in.alpha_acc * in.alpha_acc * alpha_min);
  const double t5 = 4.0 * std::pow(in.c_r, 1.5) * in.norm_f0 * in.norm_f0 *
                    in.d * log_dd /
                    (std::pow(in.alpha_acc, 1.5) * alpha_min);
  return in.beta * std::max({t1, t2, t3, t4, t5});
}

LemmaReport check_lemma8(const LemmaInstance& instance, const LossModel& loss,
                         const Regularizer& reg, double alpha, double delta,
                         int trials, std::uint64_t seed) {
  const DvpParams params =
      dvp_calibrate(alpha, loss.c1, instance.dataset.size(), instance.erm.c_r,
                    instance.erm.rho, instance.eta, instance.n_p,
                    ZetaRule::kProofHalf);
  if (params.phi > 0.0) {
    throw std::invalid_argument(
        "check_lemma8: instance falls in the phi > 0 regime");
  }
  const int d = instance.dataset.dim();
  const double b = instance.dataset.size();
  const double log_dd = std::log(d / delta);
  const double bound = 16.0 * d * d * log_dd * log_dd /
                       (instance.erm.rho * b * b * alpha * alpha);
  return run_gap_trials("lemma8", base_objective(instance, loss, reg), instance,
                        bound, delta, trials, seed, 8, 1, params.zeta, false);
}

LemmaReport check_lemma11(const LemmaInstance& instance, const LossModel& loss,
                          const Regularizer& reg, double alpha, double delta,
                          int trials, std::uint64_t seed) {
  const int d = instance.dataset.dim();
  const double b = instance.dataset.size();
  const double c = instance.erm.c_r;
  const double rho = instance.erm.rho;
  const double log_dd = std::log(d / delta);
  const double np = instance.n_p;
  const double bound = 16.0 * c * c * instance.eta * instance.eta * np * np *
                       d * d * log_dd * log_dd /
                       (rho * rho * rho * b * b * alpha * alpha);
  const double zeta = pvp_zeta(rho, b, alpha, c);
  return run_gap_trials("lemma11", base_objective(instance, loss, reg), instance,
                        bound, delta, trials, seed, 11, instance.n_p + 1, zeta,
                        false);
}

LemmaReport check_lemma12(const LemmaInstance& instance, const LossModel& loss,
                          const Regularizer& reg, double alpha, double delta,
                          int trials, std::uint64_t seed) {
  const int d = instance.dataset.dim();
  const double b = instance.dataset.size();
  const double c = instance.erm.c_r;
  const double rho = instance.erm.rho;
  const double log_dd = std::log(d / delta);
  const double bound = 4.0 * c * c * d * d *
                       (rho * reg.hessian_bound + loss.c4_lipschitz * c) *
                       log_dd * log_dd / (rho * rho * b * b * alpha * alpha);
  const double zeta = pvp_zeta(rho, b, alpha, c);
  return run_gap_trials("lemma12", base_objective(instance, loss, reg), instance,
                        bound, delta, trials, seed, 12, instance.n_p + 1, zeta,
                        true);
}

namespace {

// One mechanism round on a single isolated node (no neighbors), returning
// the scalar the adversary observes.
double single_node_output(AuditMechanism mechanism, const NodeDataset& dataset,
                          double alpha, const ErmParams& erm, double eta,
                          ZetaRule rule, CounterRng stream) {
  const int d = dataset.dim();
  NodeObjective objective;
  objective.points = &dataset.points;
  objective.loss = nullptr;  // set below
  static const LossModel logistic = logistic_loss();
  static const Regularizer l2 = l2_regularizer();
  objective.loss = &logistic;
  objective.reg = &l2;
  objective.loss_scale = erm.c_r / dataset.size();
  objective.rho = erm.rho;
  NewtonOptions options;
  options.tol = 1e-9;
  options.max_iters = 300;

  if (mechanism == AuditMechanism::kDvp) {
    const DvpParams params = dvp_calibrate(alpha, logistic.c1, dataset.size(),
                                           erm.c_r, erm.rho, eta, 0, rule);
    NoiseSpec spec{d, params.zeta, stream};
    const Eigen::VectorXd eps = sample_noise(spec);
    objective.linear = erm.c_r / dataset.size() * eps;  // 2 mu with lambda = 0
    objective.ridge = params.phi;
    return minimize_newton(objective, Eigen::VectorXd::Zero(d), options).f[0];
  }
  // PVP: the minimizer is data-determined; the release is V = f + eps.
  const Eigen::VectorXd f =
      minimize_newton(objective, Eigen::VectorXd::Zero(d), options).f;
  NoiseSpec spec{d, pvp_zeta(erm.rho, dataset.size(), alpha, erm.c_r), stream};
  return f[0] + sample_noise(spec)[0];
}

}  // namespace

AuditReport audit_privacy(AuditMechanism mechanism, const NodeDataset& dataset,
                          int neighbor_index, const DataPoint& replacement,
                          double alpha, const ErmParams& erm, double eta,
                          ZetaRule rule, const AuditConfig& audit,
                          std::uint64_t seed) {
  if (dataset.dim() != 1) {
    throw std::invalid_argument("audit_privacy: histogram auditing requires d = 1");
  }
  if (audit.runs < 1000) {
    throw std::invalid_argument("audit_privacy: too few runs");
  }
  const NodeDataset neighbor =
      neighboring_dataset(dataset, neighbor_index, replacement);

  std::vector<double> base(audit.runs), alt(audit.runs);
  for (int r = 0; r < audit.runs; ++r) {
    base[r] = single_node_output(
        mechanism, dataset, alpha, erm, eta, rule,
        CounterRng::derive(seed, StreamPurpose::kAuditBase, 1,
                           static_cast<std::uint64_t>(r)));
    alt[r] = single_node_output(
        mechanism, neighbor, alpha, erm, eta, rule,
        CounterRng::derive(seed, StreamPurpose::kAuditAlt, 1,
                           static_cast<std::uint64_t>(r)));
  }

  double lo = std::min(*std::min_element(base.begin(), base.end()),
                       *std::min_element(alt.begin(), alt.end()));
  double hi = std::max(*std::max_element(base.begin(), base.end()),
                       *std::max_element(alt.begin(), alt.end()));
  if (hi <= lo) hi = lo + 1.0;
  const double width = (hi - lo) / audit.bins;

  std::vector<long> count_base(audit.bins, 0), count_alt(audit.bins, 0);
  auto bin_of = [&](double v) {
    int b = static_cast<int>((v - lo) / width);
    return std::clamp(b, 0, audit.bins - 1);
  };
  for (double v : base) ++count_base[bin_of(v)];
  for (double v : alt) ++count_alt[bin_of(v)];

  // Merge adjacent bins left to right until both histograms reach the
  // occupancy floor; a sparse trailing remainder joins the last merged bin.
  AuditReport report;
  report.mechanism = mechanism == AuditMechanism::kDvp ? "dvp" : "pvp";
  report.alpha = alpha;
  report.runs = audit.runs;
  std::vector<std::pair<long, long>> merged;
  long acc_base = 0, acc_alt = 0;
  for (int b = 0; b < audit.bins; ++b) {
    if (count_base[b] < audit.min_count || count_alt[b] < audit.min_count) {
      report.merged_warning = true;
    }
    acc_base += count_base[b];
    acc_alt += count_alt[b];
    if (acc_base >= audit.min_count && acc_alt >= audit.min_count) {
      merged.emplace_back(acc_base, acc_alt);
      acc_base = acc_alt = 0;
    }
  }
  if (acc_base > 0 || acc_alt > 0) {
    if (!merged.empty()) {
      merged.back().first += acc_base;
      merged.back().second += acc_alt;
    } else {
      throw std::runtime_error("audit_privacy: insufficient bin occupancy");
    }
  }
  if (report.merged_warning) {
    std::cerr << "audit_privacy: merged bins below occupancy floor "
              << audit.min_count << "\n";
  }

  double worst = 0.0;
  for (const auto& [cb, ca] : merged) {
    const double ratio = std::abs(std::log(static_cast<double>(cb) / ca));
    worst = std::max(worst, ratio);
  }
  report.epsilon_hat = worst;
  report.merged_bins = static_cast<int>(merged.size());
  return report;
}

double measure_gap(const RunTrace& trace, const PartitionedDataset& partitioned,
                   const LossModel& loss, const Regularizer& reg,
                   const ErmParams& params, int t, double residual_tol) {
  if (trace.iterations.empty()) {
    throw std::invalid_argument("measure_gap: empty trace");
  }
  if (t < 1 || t > static_cast<int>(trace.iterations.size())) {
    throw std::invalid_argument("measure_gap: iteration out of range");
  }
  if (trace.iterations.back().residual > residual_tol) {
    throw std::runtime_error("measure_gap: trace has not converged");
  }
  auto average_classifier = [&](const IterationRecord& record) {
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(trace.dim);
    for (const auto& node : record.nodes) avg += node.f;
    return Eigen::VectorXd(avg / static_cast<double>(record.nodes.size()));
  };
  const double at_t = centralized_objective(
      average_classifier(trace.iterations[t - 1]), partitioned, loss, reg, params);
  const double at_end = centralized_objective(
      average_classifier(trace.iterations.back()), partitioned, loss, reg, params);
  return at_t - at_end;
}

}  // namespace dpadmm
