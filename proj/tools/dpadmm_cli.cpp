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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpadmm/analysis.hpp"
#include "dpadmm/experiments.hpp"

using json = nlohmann::json;
using namespace dpadmm;

namespace {

std::string alpha_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", alpha);
  return buf;
}

int cmd_run(const std::string& config_path) {
  const ExperimentConfig config = load_config_file(config_path);
  const auto points = load_dataset_spec(config.dataset);
  const NetworkGraph graph = parse_topology_spec(config.topology);
  const LossModel loss = logistic_loss();
  const Regularizer reg = l2_regularizer();
  AdmmConfig admm;
  admm.eta = config.eta;
  admm.max_iters = config.iterations;
  admm.inner_tol = config.inner_tol;
  admm.init_scale = config.init_scale;
  admm.erm = ErmParams{config.c_r, config.rho};
  std::filesystem::create_directories(config.output_dir);

  // A schedule file names the per-iteration alpha sequence and replaces the
  // alpha grid; otherwise every grid value runs as a constant schedule.
  const bool scheduled = !config.alpha_schedule_file.empty();
  std::vector<double> schedule_values;
  if (scheduled) schedule_values = load_alpha_schedule(config.alpha_schedule_file);
  const std::vector<double> alphas =
      config.mechanism == Mechanism::kNone || scheduled
          ? std::vector<double>{scheduled ? schedule_values.front() : 0.0}
          : config.alphas;
  for (double alpha : alphas) {
    const AlphaSchedule schedule =
        scheduled ? AlphaSchedule(schedule_values) : AlphaSchedule(alpha);
    const std::string tag = scheduled ? "sched" : "a" + alpha_tag(alpha);
    for (std::uint64_t seed : config.seeds) {
      const PartitionedDataset parts =
          partition(points, graph, PartitionStrategy::kEven, seed);
      RunTrace trace;
      std::string name;
      switch (config.mechanism) {
        case Mechanism::kNone:
          trace = run_nonprivate(parts, graph, loss, reg, admm, seed);
          name = "trace_nonprivate_s" + std::to_string(seed);
          break;
        case Mechanism::kDvp:
          trace = run_dvp(parts, graph, loss, reg, admm, schedule,
                          config.zeta_rule, seed);
          name = "trace_dvp_" + tag + "_s" + std::to_string(seed);
          break;
        case Mechanism::kPvp: {
          const int t_stop =
              config.t_stop > 0 ? config.t_stop : admm.max_iters - 1;
          AdmmConfig pvp_admm = admm;
          pvp_admm.max_iters = t_stop + 1;
          trace = run_pvp(parts, graph, loss, reg, pvp_admm, schedule, t_stop,
                          config.zeta_rule, seed);
          name = "trace_pvp_" + tag + "_s" + std::to_string(seed);
          break;
        }
      }
      const std::string path = config.output_dir + "/" + name + ".csv";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path);
      out << trace.to_csv();
      const auto& last = trace.iterations.back();
      double mean_loss = 0.0;
      for (const auto& node : last.nodes) mean_loss += node.empirical_loss;
      mean_loss /= static_cast<double>(last.nodes.size());
      std::printf("%s: iterations=%zu residual=%.3e mean_loss=%.6f\n",
                  path.c_str(), trace.iterations.size(), last.residual,
                  mean_loss);
    }
  }
  return 0;
}

int cmd_curves(const std::string& config_path) {
  const ExperimentConfig config = load_config_file(config_path);
  const ConvergenceResult result = run_convergence_suite(config);
  std::printf("wrote %s/convergence_*.{csv,svg} (%zu series, %zu iterations)\n",
              config.output_dir.c_str(), result.curves.size(),
              result.table.rows.size());
  return 0;
}

int cmd_tradeoff(const std::string& config_path, double alpha_lo,
                 double alpha_hi) {
  const ExperimentConfig config = load_config_file(config_path);
  const TradeoffFit fit = run_tradeoff_suite(config);
  json line;
  line["name"] = "tradeoff_fit";
  line["c4"] = fit.model.fit_c4;
  line["c5"] = fit.model.fit_c5;
  line["c6"] = fit.model.c6;
  line["rmse"] = fit.rmse;
  line["converged"] = fit.converged;
  line["degenerate"] = fit.degenerate;
  std::cout << line.dump() << "\n";
  if (fit.converged && !fit.degenerate) {
    const double best = choose_alpha(fit.model, alpha_lo, alpha_hi);
    json rec;
    rec["name"] = "alpha_recommendation";
    rec["alpha"] = best;
    rec["utility"] = utility_privacy(fit.model, best);
    rec["accuracy_loss"] = fit.model.accuracy_loss(best);
    std::cout << rec.dump() << "\n";
  }
  return 0;
}

NodeDataset audit_fixture(int b) {
  NodeDataset ds;
  ds.node_id = 1;
  for (int i = 0; i < b; ++i) {
    const double sign = i % 2 ? 1.0 : -1.0;
    const double x = sign * (0.25 + 0.7 * i / std::max(1, b - 1));
    ds.points.push_back(
        {Eigen::VectorXd::Constant(1, x), i < b / 2 ? 1.0 : -1.0});
  }
  return ds;
}

int cmd_audit(const std::string& mechanism, double alpha, int b, double c_r,
              double rho, double eta, int runs, int bins, int min_count,
              double slack, const std::string& zeta_rule, std::uint64_t seed) {
  const NodeDataset ds = audit_fixture(b);
  const DataPoint replacement{Eigen::VectorXd::Constant(1, -0.95), -1.0};
  AuditConfig audit;
  audit.runs = runs;
  audit.bins = bins;
  audit.min_count = min_count;
  audit.slack = slack;
  const AuditReport report = audit_privacy(
      mechanism == "dvp" ? AuditMechanism::kDvp : AuditMechanism::kPvp, ds, 0,
      replacement, alpha, ErmParams{c_r, rho}, eta,
      zeta_rule == "algorithm_full" ? ZetaRule::kAlgorithmFull
                                    : ZetaRule::kProofHalf,
      audit, seed);
  const bool pass = report.epsilon_hat <= alpha + slack;
  json line;
  line["name"] = "audit_" + report.mechanism;
  line["alpha"] = report.alpha;
  line["epsilon_hat"] = report.epsilon_hat;
  line["runs"] = report.runs;
  line["merged_bins"] = report.merged_bins;
  line["pass"] = pass;
  std::cout << line.dump() << "\n";
  return pass ? 0 : 1;
}

int cmd_bounds(const BoundInputs& inputs, double alpha_min) {
  const std::vector<std::pair<std::string, double>> results = {
      {"bound_nonprivate", bound_nonprivate(inputs)},
      {"bound_dvp", bound_dvp(inputs, alpha_min)},
      {"bound_pvp_intermediate", bound_pvp_intermediate(inputs, alpha_min)},
      {"bound_pvp_full", bound_pvp_full(inputs, alpha_min)},
  };
  for (const auto& [name, bound] : results) {
    json line;
    line["name"] = name;
    line["bound"] = bound;
    std::cout << line.dump() << "\n";
  }
  return 0;
}

int cmd_lemmacheck(const std::string& which, int b, int d, double c_r,
                   double rho, double eta, int n_p, double alpha, double delta,
                   int trials, std::uint64_t seed) {
  LemmaInstance instance;
  instance.dataset.node_id = 1;
  instance.dataset.points = make_synthetic_dataset(b, d, 0.02, seed);
  instance.erm = ErmParams{c_r, rho};
  instance.eta = eta;
  instance.n_p = n_p;
  const LossModel loss = logistic_loss();
  const Regularizer reg = l2_regularizer();

  std::vector<LemmaReport> reports;
  if (which == "8" || which == "all") {
    reports.push_back(check_lemma8(instance, loss, reg, alpha, delta, trials, seed));
  }
  if (which == "11" || which == "all") {
    reports.push_back(check_lemma11(instance, loss, reg, alpha, delta, trials, seed));
  }
  if (which == "12" || which == "all") {
    reports.push_back(check_lemma12(instance, loss, reg, alpha, delta, trials, seed));
  }
  bool all_pass = true;
  for (const auto& r : reports) {
    json line;
    line["name"] = r.name;
    line["bound"] = r.bound;
    line["frequency"] = r.frequency;
    line["required"] = r.required;
    line["trials"] = r.trials;
    line["violations"] = r.violations;
    line["pass"] = r.pass;
    std::cout << line.dump() << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulator and analysis lab for differentially private consensus "
      "learning over networks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand(
      "run", "run a configured experiment, one trace per (alpha, seed)");
  run->add_option("--config", config_path, "key = value config file")->required();

  auto* curves = app.add_subcommand(
      "curves", "loss-vs-iteration curves averaged over seeds");
  curves->add_option("--config", config_path, "key = value config file")->required();

  auto* tradeoff = app.add_subcommand(
      "tradeoff", "alpha grid sweep with accuracy-curve fit");
  tradeoff->add_option("--config", config_path, "key = value config file")->required();
  double alpha_lo = 0.01, alpha_hi = 1.0;
  tradeoff->add_option("--alpha-lo", alpha_lo, "recommendation range start");
  tradeoff->add_option("--alpha-hi", alpha_hi, "recommendation range end");

  auto* audit = app.add_subcommand(
      "audit", "empirical privacy estimate for one mechanism round (d = 1)");
  std::string mechanism = "dvp", zeta_rule = "proof_half";
  double alpha = 0.5, c_r = 10.0, rho = 1.0, eta = 1.0, slack = 0.2;
  int b = 20, runs = 100000, bins = 12, min_count = 4000;
  std::uint64_t seed = 1;
  audit->add_option("--mechanism", mechanism, "dvp or pvp")
      ->check(CLI::IsMember({"dvp", "pvp"}));
  audit->add_option("--alpha", alpha, "privacy parameter");
  audit->add_option("--b", b, "points per node");
  audit->add_option("--c-r", c_r, "empirical weight");
  audit->add_option("--rho", rho, "regularizer weight");
  audit->add_option("--eta", eta, "consensus penalty");
  audit->add_option("--runs", runs, "Monte Carlo runs per dataset");
  audit->add_option("--bins", bins, "histogram bins");
  audit->add_option("--min-count", min_count, "occupancy floor per compared bin");
  audit->add_option("--slack", slack, "allowed estimator overshoot");
  audit->add_option("--zeta-rule", zeta_rule, "proof_half or algorithm_full")
      ->check(CLI::IsMember({"proof_half", "algorithm_full"}));
  audit->add_option("--seed", seed, "stream seed");

  auto* bounds = app.add_subcommand(
      "bounds", "sample-complexity calculators (JSON lines)");
  BoundInputs inputs;
  double alpha_min = 0.1;
  bounds->add_option("--norm-f0", inputs.norm_f0, "reference classifier norm bound");
  bounds->add_option("--alpha-acc", inputs.alpha_acc, "generalization slack");
  bounds->add_option("--delta", inputs.delta, "confidence parameter");
  bounds->add_option("--c-r", inputs.c_r, "empirical weight");
  bounds->add_option("--rho", inputs.rho, "regularizer weight");
  bounds->add_option("--eta", inputs.eta, "consensus penalty");
  bounds->add_option("--n-p", inputs.n_p, "neighbor count");
  bounds->add_option("--d", inputs.d, "feature dimension");
  bounds->add_option("--c1", inputs.c1, "loss curvature bound");
  bounds->add_option("--beta", inputs.beta, "multiplicative constant");
  bounds->add_option("--c-b", inputs.c_b,
                     "override for the released-variable term (default c_r)");
  bounds->add_option("--alpha-min", alpha_min,
                     "smallest privacy parameter over the schedule");

  auto* lemmacheck = app.add_subcommand(
      "lemmacheck", "Monte Carlo objective-gap bound checks (JSON lines)");
  std::string which = "all";
  double delta = 0.05;
  int trials = 10000, d = 3, n_p = 2, lemma_b = 50;
  double lemma_c_r = 1.0, lemma_rho = 0.5, lemma_eta = 1.0, lemma_alpha = 0.5;
  std::uint64_t lemma_seed = 1;
  lemmacheck->add_option("--lemma", which, "8, 11, 12 or all")
      ->check(CLI::IsMember({"8", "11", "12", "all"}));
  lemmacheck->add_option("--b", lemma_b, "points per node");
  lemmacheck->add_option("--d", d, "feature dimension");
  lemmacheck->add_option("--c-r", lemma_c_r, "empirical weight");
  lemmacheck->add_option("--rho", lemma_rho, "regularizer weight");
  lemmacheck->add_option("--eta", lemma_eta, "consensus penalty");
  lemmacheck->add_option("--n-p", n_p, "neighbor count");
  lemmacheck->add_option("--alpha", lemma_alpha, "privacy parameter");
  lemmacheck->add_option("--delta", delta, "confidence parameter");
  lemmacheck->add_option("--trials", trials, "Monte Carlo trials");
  lemmacheck->add_option("--seed", lemma_seed, "stream seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path);
    if (*curves) return cmd_curves(config_path);
    if (*tradeoff) return cmd_tradeoff(config_path, alpha_lo, alpha_hi);
    if (*audit) {
      return cmd_audit(mechanism, alpha, b, c_r, rho, eta, runs, bins,
                       min_count, slack, zeta_rule, seed);
    }
    if (*bounds) return cmd_bounds(inputs, alpha_min);
    if (*lemmacheck) {
      return cmd_lemmacheck(which, lemma_b, d, lemma_c_r, lemma_rho, lemma_eta,
                            n_p, lemma_alpha, delta, trials, lemma_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
