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

#include "dpadmm/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dpadmm {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng CounterRng::derive(std::uint64_t seed, StreamPurpose purpose,
                              std::uint64_t node, std::uint64_t iteration) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ static_cast<std::uint64_t>(purpose));
  s = mix64(s ^ node);
  s = mix64(s ^ iteration);
  return CounterRng(s);
}

std::uint64_t CounterRng::next_u64() {
  state_ += kGolden;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double CounterRng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::exponential(double scale) {
  // 1 - u lies in (0, 1], so the log is finite.
  return -std::log1p(-next_unit()) * scale;
}

double CounterRng::gamma_int(int k, double theta) {
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += exponential(theta);
  return sum;
}

double CounterRng::normal() {
  const double u1 = 1.0 - next_unit();  // (0, 1]
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::VectorXd CounterRng::sphere_direction(int dim) {
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal();
    norm = v.norm();
  } while (norm < 1e-300);
  return v / norm;
}

Eigen::VectorXd sample_noise(const NoiseSpec& spec) {
  if (spec.dim < 1) throw std::invalid_argument("sample_noise: dim must be >= 1");
  if (!(spec.zeta > 0.0)) {
    throw std::invalid_argument("sample_noise: zeta must be positive");
  }
  CounterRng rng = spec.stream;
  const double radius = rng.gamma_int(spec.dim, 1.0 / spec.zeta);
  return radius * rng.sphere_direction(spec.dim);
}

double gamma_tail_threshold(int k, double theta, double delta) {
  if (k < 1) throw std::invalid_argument("gamma_tail_threshold: k must be >= 1");
  if (!(theta > 0.0)) {
    throw std::invalid_argument("gamma_tail_threshold: theta must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("gamma_tail_threshold: delta must be in (0, 1)");
  }
  return k * theta * std::log(k / delta);
}

double gamma_cdf_int(int k, double theta, double x) {
  if (k < 1) throw std::invalid_argument("gamma_cdf_int: k must be >= 1");
  if (!(theta > 0.0)) {
    throw std::invalid_argument("gamma_cdf_int: theta must be positive");
  }
  if (x <= 0.0) return 0.0;
  const double y = x / theta;
  // P(k, y) = 1 - exp(-y) * sum_{j<k} y^j / j!
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < k; ++j) {
    term *= y / j;
    sum += term;
  }
  return 1.0 - std::exp(-y) * sum;
}

}  // namespace dpadmm
