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

// Continuation path: minimize J(sigmoid(x / tau)) by gradient descent while
// tau is annealed toward zero, warm-starting every temperature from the
// previous solution.

#ifndef PBOPT_CONTINUATION_HPP
#define PBOPT_CONTINUATION_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pbopt/core.hpp"
#include "pbopt/error.hpp"
#include "pbopt/optim.hpp"

namespace pbopt {

inline constexpr double kMinTemperature = 1e-12;

inline double stable_sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

/// Exponential schedule tau_k = tau0 * gamma^k, k = 0..K-1, with gamma set
/// so the last entry equals tau_final. Each tau is held for steps_per_tau
/// iterations.
class TemperatureSchedule {
 public:
  TemperatureSchedule(double tau0 = 1.0, double tau_final = 1.0 / 200.0,
                      std::int64_t steps_per_tau = 100)
      : tau0_(tau0), tau_final_(tau_final), steps_(steps_per_tau) {
    if (!(tau0 > 0.0) || !(tau_final > 0.0) || !(tau_final < tau0)) {
      throw parameter_error("schedule needs tau0 > tau_final > 0");
    }
    if (steps_per_tau < 1) throw parameter_error("steps_per_tau must be >= 1");
  }

  double tau0() const { return tau0_; }
  double tau_final() const { return tau_final_; }
  std::int64_t steps_per_tau() const { return steps_; }

  /// ceil(total_iters / steps_per_tau) temperatures; a single-entry schedule is
  /// {tau0}.
  std::vector<double> temperatures(std::int64_t total_iters) const {
    if (total_iters < 0) throw parameter_error("iteration budget must be >= 0");
    const std::int64_t len = (total_iters + steps_ - 1) / steps_;
    std::vector<double> taus;
    if (len == 0) return taus;
    taus.reserve(static_cast<std::size_t>(len));
    if (len == 1) {
      taus.push_back(tau0_);
      return taus;
    }
    const double log_gamma = std::log(tau_final_ / tau0_) / static_cast<double>(len - 1);
    for (std::int64_t k = 0; k < len; ++k) {
      taus.push_back(tau0_ * std::exp(log_gamma * static_cast<double>(k)));
    }
    taus.front() = tau0_;
    taus.back() = tau_final_;
    return taus;
  }

 private:
  double tau0_;
  double tau_final_;
  std::int64_t steps_;
};

struct CPState {
  std::vector<double> x;
  double tau = 1.0;
};

/// Gradient of x -> J(sigmoid(x / tau)).
template <SmoothLoss F>
void cp_gradient(const F& f, std::span<const double> x, double tau, std::span<double> out) {
  if constexpr (std::derived_from<F, PBFunction>) {
    if (!f.has_smooth()) throw capability_error("continuation needs a smooth loss");
  }
  const double t = std::max(tau, kMinTemperature);
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = stable_sigmoid(x[i] / t);
  f.grad_smooth(u, out);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] *= u[i] * (1.0 - u[i]) / t;
}

template <SmoothLoss F>
void cp_step(const F& f, CPState& state, Optimizer& opt) {
  std::vector<double> g(state.x.size());
  cp_gradient(f, state.x, state.tau, g);
  opt.step(state.x, g);
}

/// z = 1[x > 0].
inline BitVec threshold(std::span<const double> x) {
  BitVec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z.set(i, x[i] > 0.0);
  return z;
}

struct CPRecord {
  std::int64_t iteration;
  double discrete_loss;
  double tau;
};

/// Runs total_iters steps. Row 0 is the initial state; row t is the state
/// after t updates, logged with the temperature used for that update.
/// `observe` (optional) sees every row with the current x.
template <SmoothLoss F>
std::vector<CPRecord> cp_run(
    const F& f, const TemperatureSchedule& schedule, std::int64_t total_iters,
    std::vector<double> x_init, Optimizer& opt,
    const std::function<void(const CPRecord&, std::span<const double>)>& observe = {}) {
  if (x_init.size() != f.dim()) throw std::invalid_argument("cp_run: x_init has wrong size");
  const std::vector<double> taus = schedule.temperatures(total_iters);
  CPState state{std::move(x_init), schedule.tau0()};
  std::vector<CPRecord> out;
  out.reserve(static_cast<std::size_t>(total_iters) + 1);
  auto log = [&](std::int64_t it) {
    out.push_back({it, f.eval(threshold(state.x)), state.tau});
    if (observe) observe(out.back(), state.x);
  };
  log(0);
  for (std::int64_t it = 0; it < total_iters; ++it) {
    state.tau = taus[static_cast<std::size_t>(it / schedule.steps_per_tau())];
    cp_step(f, state, opt);
    log(it + 1);
  }
  return out;
}

}  // namespace pbopt

#endif  // PBOPT_CONTINUATION_HPP
