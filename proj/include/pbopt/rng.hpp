// Copyright 2026 The pbopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PBOPT_RNG_HPP
#define PBOPT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace pbopt {

/// Deterministic 64-bit generator used by every run.
///
/// Backed by std::mt19937_64 seeded through std::seed_seq from the
/// (master seed, stream index) pair. Uniform variates are built from the top
/// 53 bits of the raw output so the stream of doubles does not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t master_seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe to take logs of.
  double uniform_open0() { return 1.0 - uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Exp(rate) by inversion.
  double exponential(double rate = 1.0) { return -std::log(uniform_open0()) / rate; }

  /// Gamma(k, 1) for integer shape k as a sum of k unit exponentials.
  double gamma_int(int k) {
    double total = 0.0;
    for (int j = 0; j < k; ++j) total += exponential();
    return total;
  }

  /// Standard normal (Box-Muller, one variate per call).
  double normal() {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pbopt

#endif  // PBOPT_RNG_HPP
