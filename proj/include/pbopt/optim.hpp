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

#ifndef PBOPT_OPTIM_HPP
#define PBOPT_OPTIM_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbopt/error.hpp"

namespace pbopt {

enum class OptimizerKind { Sgd, RmsProp };

inline std::string_view to_string(OptimizerKind k) {
  return k == OptimizerKind::Sgd ? "sgd" : "rmsprop";
}

inline OptimizerKind parse_optimizer_kind(std::string_view s) {
  if (s == "sgd") return OptimizerKind::Sgd;
  if (s == "rmsprop") return OptimizerKind::RmsProp;
  throw std::invalid_argument("unknown optimizer '" + std::string(s) + "'");
}

/// First-order minimizer: x <- x - lr * g (SGD) or
/// v <- a v + (1 - a) g^2, x <- x - lr * g / (sqrt(v) + eps) (RMSprop).
class Optimizer {
 public:
  explicit Optimizer(OptimizerKind kind = OptimizerKind::Sgd, double lr = 0.1,
                     double rms_decay = 0.99, double rms_eps = 1e-8)
      : kind_(kind), lr_(lr), decay_(rms_decay), eps_(rms_eps) {
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw parameter_error("learning rate must be >= 0");
    if (!(rms_decay >= 0.0 && rms_decay < 1.0)) throw parameter_error("RMSprop decay in [0,1)");
    if (!(rms_eps > 0.0)) throw parameter_error("RMSprop epsilon must be positive");
  }

  void step(std::span<double> x, std::span<const double> g) {
    if (x.size() != g.size()) throw std::invalid_argument("optimizer: size mismatch");
    if (kind_ == OptimizerKind::Sgd) {
      for (std::size_t k = 0; k < x.size(); ++k) x[k] -= lr_ * g[k];
      return;
    }
    if (sq_.size() != x.size()) sq_.assign(x.size(), 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      sq_[k] = decay_ * sq_[k] + (1.0 - decay_) * g[k] * g[k];
      x[k] -= lr_ * g[k] / (std::sqrt(sq_[k]) + eps_);
    }
  }

  OptimizerKind kind() const { return kind_; }
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  std::span<const double> accumulator() const { return sq_; }

 private:
  OptimizerKind kind_;
  double lr_;
  double decay_;
  double eps_;
  std::vector<double> sq_;
};

}  // namespace pbopt

#endif  // PBOPT_OPTIM_HPP
