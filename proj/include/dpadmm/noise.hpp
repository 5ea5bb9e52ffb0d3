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

#ifndef DPADMM_NOISE_HPP
#define DPADMM_NOISE_HPP

#include <cstdint>

#include <Eigen/Core>

namespace dpadmm {

// Stream labels. Each (seed, purpose, node, iteration) tuple names an
// independent random stream, so results do not depend on which thread or in
// which order a node update runs. The derivation is documented bit-exactly
// in the README and must not change without a format bump.
enum class StreamPurpose : std::uint64_t {
  kInit = 1,       // initial classifiers f_p(0)
  kMechanism = 2,  // per-iteration mechanism noise
  kPartition = 3,  // dataset shuffling
  kGraph = 4,      // random topology sampling (node slot = attempt index)
  kAuditBase = 5,  // auditor runs on the base dataset
  kAuditAlt = 6,   // auditor runs on the neighboring dataset
  kLemma = 7,      // lemma-checker trials (node slot = lemma id)
  kSynthetic = 8,  // synthetic dataset generation
};

// splitmix64 finalizer; the single mixing primitive behind every stream.
std::uint64_t mix64(std::uint64_t z);

// Counter-based generator: state advances by the splitmix64 golden-ratio
// increment and each output is mix64 of the state. Copyable value type;
// identical construction arguments give identical output sequences.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t state) : state_(state) {}

  static CounterRng derive(std::uint64_t seed, StreamPurpose purpose,
                           std::uint64_t node, std::uint64_t iteration);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit();

  // Exp(scale): mean = scale.
  double exponential(double scale);

  // Gamma with integer shape k and scale theta, as a sum of k exponentials.
  double gamma_int(int k, double theta);

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  // Uniform direction on the unit sphere in dim dimensions.
  Eigen::VectorXd sphere_direction(int dim);

 private:
  std::uint64_t state_;
};

// Parameters of one noise draw with density K(eps) proportional to
// exp(-zeta * ||eps||).
struct NoiseSpec {
  int dim = 0;
  double zeta = 0.0;
  CounterRng stream{0};
};

// Draws eps = r * u with r ~ Gamma(dim, 1/zeta) and u uniform on the unit
// sphere, the polar factorization of the exponential-norm density. The spec's
// stream is copied, so sampling the same spec twice gives the same vector.
Eigen::VectorXd sample_noise(const NoiseSpec& spec);

// Threshold T = k * theta * ln(k / delta) with P(Gamma(k, theta) < T) >= 1 - delta.
double gamma_tail_threshold(int k, double theta, double delta);

// CDF of Gamma(k, theta) at x for integer shape k (Erlang series).
double gamma_cdf_int(int k, double theta, double x);

}  // namespace dpadmm

#endif  // DPADMM_NOISE_HPP
