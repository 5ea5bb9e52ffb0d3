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

#include "dpadmm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dpadmm/noise.hpp"

namespace dpadmm {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string token;
  while (std::getline(ss, token, sep)) out.push_back(token);
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "dataset") {
      config.dataset = value;
    } else if (key == "topology") {
      config.topology = value;
    } else if (key == "mechanism") {
      if (value == "none") config.mechanism = Mechanism::kNone;
      else if (value == "dvp") config.mechanism = Mechanism::kDvp;
      else if (value == "pvp") config.mechanism = Mechanism::kPvp;
      else throw std::runtime_error("config: unknown mechanism '" + value + "'");
    } else if (key == "alpha") {
      config.alphas.clear();
      for (const auto& tok : split(value, ',')) {
        config.alphas.push_back(std::stod(trim(tok)));
      }
      if (config.alphas.empty()) throw std::runtime_error("config: empty alpha list");
    } else if (key == "alpha_schedule") {
      config.alpha_schedule_file = value;
    } else if (key == "rho") {
      config.rho = std::stod(value);
    } else if (key == "c_r") {
      config.c_r = std::stod(value);
    } else if (key == "eta") {
      config.eta = std::stod(value);
    } else if (key == "iterations" || key == "max_iters") {
      config.iterations = std::stoi(value);
    } else if (key == "t_stop") {
      config.t_stop = std::stoi(value);
    } else if (key == "inner_tol") {
      config.inner_tol = std::stod(value);
    } else if (key == "init_scale") {
      config.init_scale = std::stod(value);
    } else if (key == "zeta_rule") {
      if (value == "proof_half") config.zeta_rule = ZetaRule::kProofHalf;
      else if (value == "algorithm_full") config.zeta_rule = ZetaRule::kAlgorithmFull;
      else throw std::runtime_error("config: unknown zeta_rule '" + value + "'");
    } else if (key == "seeds") {
      config.seeds.clear();
      for (const auto& tok : split(value, ',')) {
        config.seeds.push_back(std::stoull(trim(tok)));
      }
      if (config.seeds.empty()) throw std::runtime_error("config: empty seed list");
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "loss_iteration") {
      config.loss_iteration = std::stoi(value);
    } else if (key == "c6_mode") {
      if (value != "min" && value != "mean_20_100") {
        throw std::runtime_error("config: unknown c6_mode '" + value + "'");
      }
      config.c6_mode = value;
    } else {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
  }
  for (double a : config.alphas) {
    if (!(a > 0.0)) throw std::runtime_error("config: alpha values must be positive");
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::vector<double> load_alpha_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const double alpha = std::stod(line);
    if (!(alpha > 0.0)) {
      throw std::runtime_error("schedule line " + std::to_string(line_no) +
                               ": alpha must be positive");
    }
    values.push_back(alpha);
  }
  if (values.empty()) throw std::runtime_error("schedule file is empty: " + path);
  return values;
}

double TradeoffModel::accuracy_loss(double alpha) const {
  return fit_c4 * std::exp(-fit_c5 * alpha) + c6;
}

double utility_privacy(const TradeoffModel& model, double alpha) {
  const double denom = model.omega3 * alpha + model.omega4 * alpha * alpha;
  if (!(denom > 0.0)) {
    throw std::invalid_argument("utility_privacy: log argument not positive");
  }
  return model.omega1 * std::log(model.omega2 / denom);
}

std::vector<double> empirical_loss(const RunTrace& trace,
                                   const PartitionedDataset& partitioned,
                                   const LossModel& loss, const ErmParams& params,
                                   int t) {
  if (t < 1 || t > static_cast<int>(trace.iterations.size())) {
    throw std::invalid_argument("empirical_loss: iteration out of range");
  }
  const IterationRecord& record = trace.iterations[t - 1];
  std::vector<double> out(record.nodes.size());
  for (std::size_t p = 0; p < record.nodes.size(); ++p) {
    out[p] = node_empirical_loss(record.nodes[p].f, partitioned.per_node[p],
                                 loss, params);
  }
  return out;
}

double misclassification_rate(const Eigen::VectorXd& classifier,
                              const std::vector<DataPoint>& test_set) {
  if (test_set.empty()) {
    throw std::invalid_argument("misclassification_rate: empty test set");
  }
  int wrong = 0;
  for (const auto& p : test_set) {
    const double pred = classifier.dot(p.x) >= 0.0 ? 1.0 : -1.0;
    if (pred != p.y) ++wrong;
  }
  return static_cast<double>(wrong) / test_set.size();
}

std::vector<DataPoint> make_synthetic_dataset(int n, int d, double margin,
                                              std::uint64_t seed) {
  if (n < 1 || d < 1 || margin < 0.0 || margin >= 1.0) {
    throw std::invalid_argument("make_synthetic_dataset: bad parameters");
  }
  CounterRng rng = CounterRng::derive(seed, StreamPurpose::kSynthetic, 0, 0);
  const Eigen::VectorXd w = rng.sphere_direction(d);
  std::vector<DataPoint> points;
  points.reserve(n);
  while (static_cast<int>(points.size()) < n) {
    Eigen::VectorXd x = rng.sphere_direction(d);
    x *= std::pow(rng.next_unit(), 1.0 / d);  // uniform in the unit ball
    const double m = w.dot(x);
    if (std::abs(m) < margin) continue;
    points.push_back(DataPoint{x, m >= 0.0 ? 1.0 : -1.0});
  }
  return points;
}

std::vector<DataPoint> load_dataset_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw std::runtime_error("empty dataset spec");
  if (parts[0] == "csv" || parts[0] == "libsvm") {
    if (parts.size() < 2) throw std::runtime_error("dataset spec: missing path");
    std::string path = spec.substr(parts[0].size() + 1);
    const LoadResult raw = load_dataset(
        path, parts[0] == "csv" ? DataFormat::kCsv : DataFormat::kLibsvm);
    return normalize(raw.points).points;
  }
  if (parts[0] == "synthetic") {
    if (parts.size() < 4) {
      throw std::runtime_error("dataset spec: synthetic:<n>:<d>:<margin>[:seed=<s>]");
    }
    std::uint64_t seed = 0;
    if (parts.size() >= 5) {
      if (parts[4].rfind("seed=", 0) != 0) {
        throw std::runtime_error("dataset spec: expected seed=<s>");
      }
      seed = std::stoull(parts[4].substr(5));
    }
    return make_synthetic_dataset(std::stoi(parts[1]), std::stoi(parts[2]),
                                  std::stod(parts[3]), seed);
  }
  throw std::runtime_error("dataset spec: unknown kind '" + parts[0] + "'");
}

std::string CsvTable::emit() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw std::runtime_error("CsvTable: ragged row");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable table;
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw std::runtime_error("CsvTable: empty input");
  for (const auto& tok : split(trim(line), ',')) table.header.push_back(tok);
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& tok : split(line, ',')) row.push_back(std::stod(tok));
    if (row.size() != table.header.size()) {
      throw std::runtime_error("CsvTable: column count mismatch");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                               "#ff7f0e", "#9467bd", "#8c564b"};

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string render_svg_chart(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel,
                             const std::vector<Series>& series) {
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 80, kRight = 160, kTop = 50, kBottom = 60;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      if (first) {
        xmin = xmax = p.x;
        ymin = ymax = p.y;
        first = false;
      }
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) { return kTop + plot_h - (y - ymin) / (ymax - ymin) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\">\n";
  out += "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
  out += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" +
         title + "</text>\n";
  out += "<text x=\"" + svg_num(kLeft + plot_w / 2) + "\" y=\"" +
         svg_num(kHeight - 16) + "\" text-anchor=\"middle\" font-size=\"13\">" +
         xlabel + "</text>\n";
  out += "<text x=\"20\" y=\"" + svg_num(kTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 " +
         svg_num(kTop + plot_h / 2) + ")\">" + ylabel + "</text>\n";
  out += "<rect x=\"" + svg_num(kLeft) + "\" y=\"" + svg_num(kTop) + "\" width=\"" +
         svg_num(plot_w) + "\" height=\"" + svg_num(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double fx = xmin + (xmax - xmin) * tick / 5.0;
    const double fy = ymin + (ymax - ymin) * tick / 5.0;
    out += "<line x1=\"" + svg_num(sx(fx)) + "\" y1=\"" + svg_num(kTop + plot_h) +
           "\" x2=\"" + svg_num(sx(fx)) + "\" y2=\"" + svg_num(kTop + plot_h + 5) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + svg_num(sx(fx)) + "\" y=\"" + svg_num(kTop + plot_h + 20) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + svg_num(fx) + "</text>\n";
    out += "<line x1=\"" + svg_num(kLeft - 5) + "\" y1=\"" + svg_num(sy(fy)) +
           "\" x2=\"" + svg_num(kLeft) + "\" y2=\"" + svg_num(sy(fy)) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + svg_num(kLeft - 8) + "\" y=\"" + svg_num(sy(fy) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + svg_num(fy) + "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kSeriesColors[s % 6];
    std::string path;
    for (const auto& p : series[s].points) {
      path += (path.empty() ? "M" : " L");
      path += svg_num(sx(p.x)) + " " + svg_num(sy(p.y));
    }
    out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    const double ly = kTop + 16 + 18 * static_cast<double>(s);
    out += "<line x1=\"" + svg_num(kWidth - kRight + 10) + "\" y1=\"" + svg_num(ly) +
           "\" x2=\"" + svg_num(kWidth - kRight + 34) + "\" y2=\"" + svg_num(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + svg_num(kWidth - kRight + 40) + "\" y=\"" +
           svg_num(ly + 4) + "\" font-size=\"11\">" + series[s].label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

namespace {

struct SuiteContext {
  std::vector<DataPoint> points;
  NetworkGraph graph;
  LossModel loss;
  Regularizer reg;
  AdmmConfig admm;
};

SuiteContext make_context(const ExperimentConfig& config) {
  SuiteContext ctx{load_dataset_spec(config.dataset),
                   parse_topology_spec(config.topology),
                   logistic_loss(),
                   l2_regularizer(),
                   {}};
  ctx.admm.eta = config.eta;
  ctx.admm.max_iters = config.iterations;
  ctx.admm.inner_tol = config.inner_tol;
  ctx.admm.init_scale = config.init_scale;
  ctx.admm.erm = ErmParams{config.c_r, config.rho};
  return ctx;
}

RunTrace run_mechanism(const SuiteContext& ctx, const ExperimentConfig& config,
                       Mechanism mechanism, double alpha, std::uint64_t seed) {
  const PartitionedDataset parts =
      partition(ctx.points, ctx.graph, PartitionStrategy::kEven, seed);
  switch (mechanism) {
    case Mechanism::kNone:
      return run_nonprivate(parts, ctx.graph, ctx.loss, ctx.reg, ctx.admm, seed);
    case Mechanism::kDvp:
      return run_dvp(parts, ctx.graph, ctx.loss, ctx.reg, ctx.admm,
                     AlphaSchedule(alpha), config.zeta_rule, seed);
    case Mechanism::kPvp: {
      const int t_stop =
          config.t_stop > 0 ? config.t_stop : ctx.admm.max_iters - 1;
      AdmmConfig admm = ctx.admm;
      admm.max_iters = t_stop + 1;
      return run_pvp(parts, ctx.graph, ctx.loss, ctx.reg, admm,
                     AlphaSchedule(alpha), t_stop, config.zeta_rule, seed);
    }
  }
  throw std::logic_error("run_mechanism: unknown mechanism");
}

double network_mean_loss(const RunTrace& trace, int t) {
  const IterationRecord& record = trace.iterations[t - 1];
  double sum = 0.0;
  for (const auto& node : record.nodes) sum += node.empirical_loss;
  return sum / static_cast<double>(record.nodes.size());
}

std::string mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::kNone: return "nonprivate";
    case Mechanism::kDvp: return "dvp";
    case Mechanism::kPvp: return "pvp";
  }
  return "unknown";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

ConvergenceResult run_convergence_suite(const ExperimentConfig& config) {
  const SuiteContext ctx = make_context(config);
  std::filesystem::create_directories(config.output_dir);
  const int iters = config.iterations;

  ConvergenceResult result;
  result.table.header.push_back("iteration");

  // Non-private baseline first, then one curve per alpha.
  std::vector<std::vector<double>> columns;
  std::vector<std::string> labels;
  {
    std::vector<double> mean(iters, 0.0);
    for (std::uint64_t seed : config.seeds) {
      const RunTrace trace =
          run_mechanism(ctx, config, Mechanism::kNone, 0.0, seed);
      for (int t = 1; t <= iters; ++t) mean[t - 1] += network_mean_loss(trace, t);
    }
    for (double& v : mean) v /= static_cast<double>(config.seeds.size());
    columns.push_back(std::move(mean));
    labels.push_back("nonprivate");
  }
  if (config.mechanism != Mechanism::kNone) {
    for (double alpha : config.alphas) {
      std::vector<double> mean(iters, 0.0);
      for (std::uint64_t seed : config.seeds) {
        const RunTrace trace =
            run_mechanism(ctx, config, config.mechanism, alpha, seed);
        const int upto = std::min<int>(iters, static_cast<int>(trace.iterations.size()));
        for (int t = 1; t <= upto; ++t) mean[t - 1] += network_mean_loss(trace, t);
      }
      for (double& v : mean) v /= static_cast<double>(config.seeds.size());
      columns.push_back(std::move(mean));
      char label[32];
      std::snprintf(label, sizeof(label), "alpha_%g", alpha);
      labels.push_back(label);
    }
  }

  for (const auto& label : labels) result.table.header.push_back(label);
  for (int t = 1; t <= iters; ++t) {
    std::vector<double> row;
    row.push_back(t);
    for (const auto& col : columns) row.push_back(col[t - 1]);
    result.table.rows.push_back(std::move(row));
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    Series s;
    s.label = labels[c];
    for (int t = 1; t <= iters; ++t) {
      s.points.push_back({static_cast<double>(t), columns[c][t - 1]});
    }
    result.curves.push_back(std::move(s));
  }

  const std::string stem =
      config.output_dir + "/convergence_" + mechanism_name(config.mechanism);
  write_file(stem + ".csv", result.table.emit());
  write_file(stem + ".svg",
             render_svg_chart("empirical loss vs iteration", "iteration",
                              "mean empirical loss", result.curves));
  return result;
}

TradeoffFit fit_accuracy_curve(const std::vector<SeriesPoint>& points, double c6) {
  if (points.size() < 2) {
    throw std::invalid_argument("fit_accuracy_curve: need at least 2 points");
  }
  TradeoffFit fit;
  fit.points = points;
  fit.model.c6 = c6;

  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, std::abs(p.y));
  std::vector<SeriesPoint> usable;
  for (const auto& p : points) {
    if (p.y - c6 > 1e-12 * std::max(1.0, scale)) usable.push_back(p);
  }
  if (usable.size() < 2) {
    fit.degenerate = true;
    fit.model.fit_c4 = 0.0;
    fit.model.fit_c5 = 0.0;
    double sq = 0.0;
    for (const auto& p : points) {
      const double r = c6 - p.y;
      sq += r * r;
    }
    fit.rmse = std::sqrt(sq / points.size());
    return fit;
  }

  // Log-linear initialization: ln(y - c6) = ln c4 - c5 * alpha.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : usable) {
    const double ly = std::log(p.y - c6);
    sx += p.x;
    sy += ly;
    sxx += p.x * p.x;
    sxy += p.x * ly;
  }
  const double n = static_cast<double>(usable.size());
  const double denom = n * sxx - sx * sx;
  double c5 = denom != 0.0 ? -(n * sxy - sx * sy) / denom : 0.0;
  double c4 = std::exp((sy + c5 * sx) / n);

  // Gauss-Newton refinement on the untransformed residuals.
  auto rmse_of = [&](double a4, double a5) {
    double sq = 0.0;
    for (const auto& p : points) {
      const double r = a4 * std::exp(-a5 * p.x) + c6 - p.y;
      sq += r * r;
    }
    return std::sqrt(sq / points.size());
  };
  double best = rmse_of(c4, c5);
  bool converged = false;
  for (int iter = 0; iter < 100; ++iter) {
    double j11 = 0, j12 = 0, j22 = 0, g1 = 0, g2 = 0;
    for (const auto& p : points) {
      const double e = std::exp(-c5 * p.x);
      const double r = c4 * e + c6 - p.y;
      const double d4 = e;
      const double d5 = -c4 * p.x * e;
      j11 += d4 * d4;
      j12 += d4 * d5;
      j22 += d5 * d5;
      g1 += d4 * r;
      g2 += d5 * r;
    }
    const double det = j11 * j22 - j12 * j12;
    if (std::abs(det) < 1e-300) break;
    double step4 = -(j22 * g1 - j12 * g2) / det;
    double step5 = -(-j12 * g1 + j11 * g2) / det;
    double damp = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const double t4 = c4 + damp * step4;
      const double t5 = c5 + damp * step5;
      const double r = rmse_of(t4, t5);
      if (r < best) {
        c4 = t4;
        c5 = t5;
        if (best - r < 1e-14 * std::max(1.0, best)) converged = true;
        best = r;
        improved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!improved) {
      converged = true;
      break;
    }
    if (converged) break;
  }

  fit.model.fit_c4 = c4;
  fit.model.fit_c5 = c5;
  fit.rmse = best;
  fit.converged = converged;
  if (std::abs(c4) < 1e-10 * std::max(1.0, scale)) fit.degenerate = true;
  return fit;
}

TradeoffFit run_tradeoff_suite(const ExperimentConfig& config) {
  if (config.mechanism == Mechanism::kNone) {
    throw std::invalid_argument("run_tradeoff_suite: pick dvp or pvp");
  }
  if (config.alphas.size() < 6) {
    throw std::invalid_argument("run_tradeoff_suite: need an alpha grid of >= 6 points");
  }
  const SuiteContext ctx = make_context(config);
  std::filesystem::create_directories(config.output_dir);

  std::vector<SeriesPoint> points;
  std::vector<std::vector<double>> mean_curves;
  for (double alpha : config.alphas) {
    std::vector<double> mean(config.iterations, 0.0);
    for (std::uint64_t seed : config.seeds) {
      const RunTrace trace =
          run_mechanism(ctx, config, config.mechanism, alpha, seed);
      const int upto = std::min<int>(config.iterations,
                                     static_cast<int>(trace.iterations.size()));
      for (int t = 1; t <= upto; ++t) mean[t - 1] += network_mean_loss(trace, t);
    }
    for (double& v : mean) v /= static_cast<double>(config.seeds.size());
    const int t_obs = config.loss_iteration > 0
                          ? std::min(config.loss_iteration, config.iterations)
                          : config.iterations;
    points.push_back({alpha, mean[t_obs - 1]});
    mean_curves.push_back(std::move(mean));
  }

  double c6 = 0.0;
  if (config.c6_mode == "min") {
    c6 = mean_curves.front().front();
    for (const auto& curve : mean_curves) {
      for (double v : curve) c6 = std::min(c6, v);
    }
  } else {
    double sum = 0.0;
    int count = 0;
    for (const auto& curve : mean_curves) {
      const int hi = std::min<int>(100, static_cast<int>(curve.size()));
      for (int t = 20; t <= hi; ++t) {
        sum += curve[t - 1];
        ++count;
      }
    }
    if (count == 0) throw std::runtime_error("run_tradeoff_suite: too few iterations for mean_20_100");
    c6 = sum / count;
  }

  TradeoffFit fit = fit_accuracy_curve(points, c6);
  if (!fit.converged && !fit.degenerate) {
    std::cerr << "run_tradeoff_suite: curve fit did not converge; reporting raw points\n";
  }
  if (fit.degenerate) {
    std::cerr << "run_tradeoff_suite: flat loss profile, degenerate fit (c4 ~ 0)\n";
  }

  CsvTable table;
  table.header = {"alpha", "mean_loss", "fitted_loss"};
  for (const auto& p : points) {
    table.rows.push_back({p.x, p.y, fit.model.accuracy_loss(p.x)});
  }
  const std::string stem =
      config.output_dir + "/tradeoff_" + mechanism_name(config.mechanism);
  write_file(stem + ".csv", table.emit());
  Series measured{"measured", points};
  Series fitted{"fitted", {}};
  for (const auto& p : points) fitted.points.push_back({p.x, fit.model.accuracy_loss(p.x)});
  write_file(stem + ".svg",
             render_svg_chart("privacy-accuracy tradeoff", "alpha",
                              "mean empirical loss", {measured, fitted}));
  return fit;
}

double choose_alpha(const TradeoffModel& model, double alpha_lo, double alpha_hi) {
  if (!(alpha_lo > 0.0) || !(alpha_hi > alpha_lo)) {
    throw std::invalid_argument("choose_alpha: empty range");
  }
  auto objective = [&](double a) {
    return utility_privacy(model, a) - model.accuracy_loss(a);
  };

  // Coarse profile to test unimodality.
  constexpr int kCoarse = 65;
  std::vector<double> values(kCoarse);
  int best_idx = 0;
  for (int i = 0; i < kCoarse; ++i) {
    const double a = alpha_lo + (alpha_hi - alpha_lo) * i / (kCoarse - 1);
    values[i] = objective(a);
    if (values[i] > values[best_idx]) best_idx = i;
  }
  bool unimodal = true;
  for (int i = 1; i < kCoarse; ++i) {
    if (i <= best_idx && values[i] < values[i - 1] - 1e-12) unimodal = false;
    if (i > best_idx && values[i] > values[i - 1] + 1e-12) unimodal = false;
  }

  if (unimodal) {
    double lo = alpha_lo + (alpha_hi - alpha_lo) *
                               std::max(0, best_idx - 1) / (kCoarse - 1);
    double hi = alpha_lo + (alpha_hi - alpha_lo) *
                               std::min(kCoarse - 1, best_idx + 1) / (kCoarse - 1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo);
    double b = lo + gr * (hi - lo);
    double fa = objective(a), fb = objective(b);
    while (hi - lo > 1e-10) {
      if (fa >= fb) {  // ties move left, toward smaller alpha
        hi = b;
        b = a;
        fb = fa;
        a = hi - gr * (hi - lo);
        fa = objective(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + gr * (hi - lo);
        fb = objective(b);
      }
    }
    return lo;
  }

  // Dense fallback at 1e-4 resolution; ties toward smaller alpha.
  const int steps = static_cast<int>(std::ceil((alpha_hi - alpha_lo) / 1e-4));
  double best_a = alpha_lo;
  double best_v = objective(alpha_lo);
  for (int i = 1; i <= steps; ++i) {
    const double a = std::min(alpha_hi, alpha_lo + 1e-4 * i);
    const double v = objective(a);
    if (v > best_v + 1e-15) {
      best_v = v;
      best_a = a;
    }
  }
  return best_a;
}

namespace {

std::vector<double> ranks_of(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length samples");
  }
  const std::vector<double> rx = ranks_of(xs);
  const std::vector<double> ry = ranks_of(ys);
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double mann_whitney_less_p(const std::vector<double>& a,
                           const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("mann_whitney_less_p: empty sample");
  }
  double u = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x < y) u += 1.0;
      else if (x == y) u += 0.5;
    }
  }
  const double m = static_cast<double>(a.size());
  const double n = static_cast<double>(b.size());
  const double mean = m * n / 2.0;
  const double sd = std::sqrt(m * n * (m + n + 1.0) / 12.0);
  const double z = (u - mean - 0.5) / sd;
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace dpadmm
