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

#ifndef DPADMM_EXPERIMENTS_HPP
#define DPADMM_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpadmm/analysis.hpp"

namespace dpadmm {

enum class Mechanism { kNone, kDvp, kPvp };

// Everything one experiment run needs, parsed from a key = value file.
// Recognized keys are documented in the README.
struct ExperimentConfig {
  std::string dataset;            // csv:<path>, libsvm:<path> or synthetic:<n>:<d>:<margin>
  std::string topology = "ring:4";
  Mechanism mechanism = Mechanism::kNone;
  std::vector<double> alphas = {0.1};   // grid for suites, schedule head otherwise
  std::string alpha_schedule_file;      // optional; one alpha per line, overrides alphas in `run`
  double rho = 0.1;
  double c_r = 10.0;
  double eta = 1.0;
  int iterations = 100;
  int t_stop = -1;                      // -1: iterations - 1
  double inner_tol = 1e-8;
  double init_scale = 0.01;
  ZetaRule zeta_rule = ZetaRule::kProofHalf;
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = ".";
  int loss_iteration = -1;              // -1: last iteration
  std::string c6_mode = "min";          // "min" or "mean_20_100"
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Reads a per-iteration alpha schedule, one positive value per line.
std::vector<double> load_alpha_schedule(const std::string& path);

// Privacy-accuracy curve models fitted from experiment output.
// accuracy_loss(a) = fit_c4 * exp(-fit_c5 * a) + c6;
// utility of privacy U(a) = omega1 * ln(omega2 / (omega3 a + omega4 a^2)).
struct TradeoffModel {
  double fit_c4 = 0.0;
  double fit_c5 = 0.0;
  double c6 = 0.0;
  double omega1 = 0.02;
  double omega2 = 6.0;
  double omega3 = 9.0;
  double omega4 = 1.0;

  double accuracy_loss(double alpha) const;
};

// U_priv(alpha); throws if the log argument is not positive.
double utility_privacy(const TradeoffModel& model, double alpha);

// Per-node empirical loss (c_r / B_p) sum_i L(y_i f_p(t).x_i) recomputed
// from the classifiers stored in the trace. t is 1-based.
std::vector<double> empirical_loss(const RunTrace& trace,
                                   const PartitionedDataset& partitioned,
                                   const LossModel& loss, const ErmParams& params,
                                   int t);

// Fraction of test points with sign(f.x) != y; sign(0) counts as +1.
double misclassification_rate(const Eigen::VectorXd& classifier,
                              const std::vector<DataPoint>& test_set);

// Separable synthetic data: directions uniform in the unit ball, labeled by
// a hidden hyperplane through the origin with margin at least `margin`.
std::vector<DataPoint> make_synthetic_dataset(int n, int d, double margin,
                                              std::uint64_t seed);

// Parses dataset specs of the form csv:<path>, libsvm:<path> or
// synthetic:<n>:<d>:<margin>[:seed=<s>]; output is normalized.
std::vector<DataPoint> load_dataset_spec(const std::string& spec);

// Plain rectangular table of doubles with a header row; the CSV files the
// suites emit all round-trip through these two functions.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string emit() const;
  static CsvTable parse(const std::string& text);
};

struct SeriesPoint {
  double x = 0.0;
  double y = 0.0;
};

struct Series {
  std::string label;
  std::vector<SeriesPoint> points;
};

// Minimal static line chart; axes, ticks and one polyline per series.
std::string render_svg_chart(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel,
                             const std::vector<Series>& series);

struct ConvergenceResult {
  // mean over seeds of the node-average empirical loss, per iteration,
  // one series per alpha plus a "nonprivate" series
  std::vector<Series> curves;
  CsvTable table;
};

// Loss-versus-iteration curves averaged over config.seeds for every alpha in
// config.alphas, plus the non-private baseline. Writes
// convergence_<mechanism>.csv and .svg under config.output_dir.
ConvergenceResult run_convergence_suite(const ExperimentConfig& config);

struct TradeoffFit {
  std::vector<SeriesPoint> points;  // (alpha, mean loss at the observed iteration)
  TradeoffModel model;
  double rmse = 0.0;
  bool converged = false;
  bool degenerate = false;  // flat data, amplitude fit collapsed
};

// Nonlinear least squares for accuracy_loss with c6 held fixed.
TradeoffFit fit_accuracy_curve(const std::vector<SeriesPoint>& points, double c6);

// Runs the mechanism over the alpha grid, fits the accuracy curve and writes
// tradeoff_<mechanism>.csv/.svg under config.output_dir.
TradeoffFit run_tradeoff_suite(const ExperimentConfig& config);

// argmax over [alpha_lo, alpha_hi] of U_priv - accuracy_loss via golden
// section when the coarse profile is unimodal, dense 1e-4 grid otherwise.
// Ties break toward the smaller (more private) alpha.
double choose_alpha(const TradeoffModel& model, double alpha_lo, double alpha_hi);

// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// One-sided Mann-Whitney p-value for "samples in `a` tend smaller than `b`"
// (normal approximation).
double mann_whitney_less_p(const std::vector<double>& a,
                           const std::vector<double>& b);

}  // namespace dpadmm

#endif  // DPADMM_EXPERIMENTS_HPP
