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

// Probability parametrizations theta = theta(r): forward map, inverse map,
// score function and Jacobian for the sigmoid, direct, cosine and escort
// families.

#ifndef PBOPT_PARAMS_HPP
#define PBOPT_PARAMS_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbopt/core.hpp"

namespace pbopt {

enum class ParamKind { Sigmoid, Direct, Cosine, Escort };

inline std::string_view to_string(ParamKind k) {
  switch (k) {
    case ParamKind::Sigmoid: return "sigmoid";
    case ParamKind::Direct: return "direct";
    case ParamKind::Cosine: return "cosine";
    case ParamKind::Escort: return "escort";
  }
  return "?";
}

inline ParamKind parse_param_kind(std::string_view s) {
  if (s == "sigmoid") return ParamKind::Sigmoid;
  if (s == "direct") return ParamKind::Direct;
  if (s == "cosine") return ParamKind::Cosine;
  if (s == "escort") return ParamKind::Escort;
  throw std::invalid_argument("unknown parametrization '" + std::string(s) + "'");
}

/// Bernoulli probabilities, one per coordinate.
struct Theta {
  std::vector<double> probs;

  Theta() = default;
  explicit Theta(std::vector<double> p) : probs(std::move(p)) {
    for (double t : probs) {
      if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("Theta: probability outside [0,1]");
    }
  }
  static Theta uniform(std::size_t d, double value = 0.5) {
    return Theta(std::vector<double>(d, value));
  }

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
  operator std::span<const double>() const { return probs; }
};

/// Underlying parameters. Escort stores two reals per coordinate,
/// interleaved as (r_i1, r_i2).
struct ParamVec {
  ParamKind kind = ParamKind::Sigmoid;
  std::vector<double> values;

  static constexpr std::size_t width(ParamKind k) { return k == ParamKind::Escort ? 2 : 1; }
  std::size_t width() const { return width(kind); }
  std::size_t dim() const { return values.size() / width(); }
  std::span<const double> coord(std::size_t i) const {
    return std::span<const double>(values).subspan(i * width(), width());
  }
};

/// Gradient estimate laid out like ParamVec::values.
using GradEstimate = std::vector<double>;

class Parametrization {
 public:
  explicit Parametrization(ParamKind kind = ParamKind::Sigmoid, double escort_power = 4.0,
                           double direct_clamp = 1e-6)
      : kind_(kind), power_(escort_power), clamp_(direct_clamp) {
    if (!(power_ > 0.0)) throw std::invalid_argument("escort power must be positive");
    if (!(clamp_ >= 0.0 && clamp_ < 0.5)) throw std::invalid_argument("direct clamp out of range");
  }

  ParamKind kind() const { return kind_; }
  double escort_power() const { return power_; }
  double direct_clamp() const { return clamp_; }
  std::size_t width() const { return ParamVec::width(kind_); }

  /// theta for a single coordinate given its width() parameters.
  double theta_of(std::span<const double> r) const {
    switch (kind_) {
      case ParamKind::Sigmoid: return 1.0 / (1.0 + std::exp(-r[0]));
      case ParamKind::Direct: return std::clamp(r[0], clamp_, 1.0 - clamp_);
      case ParamKind::Cosine: return 0.5 * (1.0 - std::cos(r[0]));
      case ParamKind::Escort: {
        const double a = std::pow(std::abs(r[0]), power_);
        const double b = std::pow(std::abs(r[1]), power_);
        if (a + b == 0.0) return 0.5;
        return a / (a + b);
      }
    }
    return 0.5;
  }

  Theta forward(const ParamVec& r) const {
    check(r);
    std::vector<double> probs(r.dim());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = theta_of(r.coord(i));
    return Theta(std::move(probs));
  }

  ParamVec inverse(std::span<const double> theta) const {
    ParamVec r{kind_, {}};
    r.values.reserve(theta.size() * width());
    for (double t : theta) {
      if (!(t > 0.0 && t < 1.0)) throw std::domain_error("inverse map needs theta in (0,1)");
      switch (kind_) {
        case ParamKind::Sigmoid: r.values.push_back(std::log(t) - std::log1p(-t)); break;
        case ParamKind::Direct: r.values.push_back(t); break;
        case ParamKind::Cosine: r.values.push_back(M_PI - std::acos(2.0 * t - 1.0)); break;
        case ParamKind::Escort:
          r.values.push_back(std::pow(t / (1.0 - t), 1.0 / power_));
          r.values.push_back(1.0);
          break;
      }
    }
    return r;
  }

  /// Score of one coordinate: d/dr log p(z_i; theta(r_i)). Zero whenever the
  /// coordinate is deterministic (theta in {0,1}).
  void score_coord(std::span<const double> r, double theta, bool z, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (theta <= 0.0 || theta >= 1.0) return;
    const double zi = z ? 1.0 : 0.0;
    switch (kind_) {
      case ParamKind::Sigmoid: out[0] = zi - theta; break;
      case ParamKind::Direct: out[0] = (zi - theta) / (theta * (1.0 - theta)); break;
      case ParamKind::Cosine: {
        const double s = std::sin(r[0]);
        if (s != 0.0) out[0] = (std::cos(r[0]) + (2.0 * zi - 1.0)) / s;
        break;
      }
      case ParamKind::Escort:
        if (r[0] != 0.0) out[0] = -(theta - zi) * power_ / r[0];
        if (r[1] != 0.0) out[1] = (theta - zi) * power_ / r[1];
        break;
    }
  }

  /// Full score vector for point z, laid out like r.values.
  void score(const ParamVec& r, const Theta& theta, const BitVec& z, std::span<double> out) const {
    const std::size_t w = width();
    for (std::size_t i = 0; i < z.size(); ++i) {
      score_coord(r.coord(i), theta[i], z[i] != 0, out.subspan(i * w, w));
    }
  }

  GradEstimate score(const ParamVec& r, const BitVec& z) const {
    const Theta theta = forward(r);
    GradEstimate out(r.values.size());
    score(r, theta, z, out);
    return out;
  }

  /// d theta_i / d r_i, laid out like r.values.
  std::vector<double> jacobian(const ParamVec& r) const {
    check(r);
    std::vector<double> jac(r.values.size(), 0.0);
    for (std::size_t i = 0; i < r.dim(); ++i) {
      const auto ri = r.coord(i);
      const double t = theta_of(ri);
      switch (kind_) {
        case ParamKind::Sigmoid: jac[i] = t * (1.0 - t); break;
        case ParamKind::Direct: jac[i] = 1.0; break;
        case ParamKind::Cosine: jac[i] = 0.5 * std::sin(ri[0]); break;
        case ParamKind::Escort: {
          const double c = power_ * t * (1.0 - t);
          if (ri[0] != 0.0) jac[2 * i] = c / ri[0];
          if (ri[1] != 0.0) jac[2 * i + 1] = -c / ri[1];
          break;
        }
      }
    }
    return jac;
  }

  /// Map a gradient w.r.t. theta to a gradient w.r.t. r (chain rule).
  GradEstimate chain(const ParamVec& r, std::span<const double> grad_theta) const {
    GradEstimate g = jacobian(r);
    const std::size_t w = width();
    for (std::size_t k = 0; k < g.size(); ++k) g[k] *= grad_theta[k / w];
    return g;
  }

  /// Keep direct parameters inside [eps, 1 - eps]; no-op for other kinds.
  void project(ParamVec& r) const {
    if (kind_ != ParamKind::Direct) return;
    for (double& v : r.values) v = std::clamp(v, clamp_, 1.0 - clamp_);
  }

 private:
  void check(const ParamVec& r) const {
    if (r.kind != kind_) throw std::invalid_argument("ParamVec kind does not match parametrization");
    if (r.values.size() % width() != 0) throw std::invalid_argument("ParamVec has ragged shape");
  }

  ParamKind kind_;
  double power_;
  double clamp_;
};

}  // namespace pbopt

#endif  // PBOPT_PARAMS_HPP
