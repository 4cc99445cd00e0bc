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

// Score-function gradient estimators in streaming form (memory O(d),
// independent of the number of samples), plus straight-through.
//
// All estimators return a gradient w.r.t. the underlying parameters r of the
// chosen parametrization; the sigmoid/direct/cosine layout has one entry per
// coordinate, escort has two.

#ifndef PBOPT_ESTIMATORS_HPP
#define PBOPT_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbopt/core.hpp"
#include "pbopt/error.hpp"
#include "pbopt/params.hpp"
#include "pbopt/rng.hpp"

namespace pbopt {

enum class EstimatorKind { Reinforce, Loorf, Arms, BStar, StraightThrough };

inline std::string_view to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::Reinforce: return "reinforce";
    case EstimatorKind::Loorf: return "loorf";
    case EstimatorKind::Arms: return "arms";
    case EstimatorKind::BStar: return "bstar";
    case EstimatorKind::StraightThrough: return "st";
  }
  return "?";
}

inline EstimatorKind parse_estimator_kind(std::string_view s) {
  if (s == "reinforce") return EstimatorKind::Reinforce;
  if (s == "loorf") return EstimatorKind::Loorf;
  if (s == "arms") return EstimatorKind::Arms;
  if (s == "bstar") return EstimatorKind::BStar;
  if (s == "st") return EstimatorKind::StraightThrough;
  throw std::invalid_argument("unknown estimator '" + std::string(s) + "'");
}

/// Largest dimension for which the exact beta* baselines are computed.
inline constexpr std::size_t kBStarMaxDim = 10;

/// A gradient estimate together with the mean loss of the samples it used.
struct Estimate {
  GradEstimate grad;
  double mean_loss = 0.0;
};

inline void sample_bernoulli(std::span<const double> theta, Rng& rng, BitVec& z) {
  for (std::size_t i = 0; i < theta.size(); ++i) z.set(i, rng.bernoulli(theta[i]));
}

// ---------------------------------------------------------------------------
// Streaming accumulators

/// Running average of J * score.
class ReinforceAccumulator {
 public:
  explicit ReinforceAccumulator(std::size_t size) : g_(size, 0.0) {}

  void add(double j, std::span<const double> score) {
    ++s_;
    const double keep = static_cast<double>(s_ - 1) / static_cast<double>(s_);
    const double w = 1.0 / static_cast<double>(s_);
    for (std::size_t k = 0; k < g_.size(); ++k) g_[k] = keep * g_[k] + w * j * score[k];
    jhat_ = keep * jhat_ + w * j;
  }

  const GradEstimate& result() const { return g_; }
  double jhat() const { return jhat_; }
  std::size_t samples() const { return s_; }

 private:
  GradEstimate g_;
  double jhat_ = 0.0;
  std::size_t s_ = 0;
};

/// Leave-one-out accumulators: jhat is the plain running mean of J, the two
/// Lambda terms use max(s-2,1)/max(s-1,1) decay and 1/max(s-1,1) weight so
/// that after s >= 2 samples they hold sums divided by (s - 1).
class LoorfAccumulator {
 public:
  explicit LoorfAccumulator(std::size_t size) : lam_slog_(size, 0.0), lam_jslog_(size, 0.0) {}

  // Losses are stored relative to the first one, so a constant loss gives an
  // exactly zero result.
  void add(double j, std::span<const double> score) {
    if (s_ == 0) shift_ = j;
    ++s_;
    const double s = static_cast<double>(s_);
    const double dj = j - shift_;
    jhat_ = (s - 1.0) / s * jhat_ + dj / s;
    const double denom = std::max(s - 1.0, 1.0);
    const double keep = std::max(s - 2.0, 1.0) / denom;
    const double w = 1.0 / denom;
    for (std::size_t k = 0; k < lam_slog_.size(); ++k) {
      lam_slog_[k] = keep * lam_slog_[k] + w * score[k];
      lam_jslog_[k] = keep * lam_jslog_[k] + w * dj * score[k];
    }
  }

  GradEstimate result() const {
    GradEstimate g(lam_slog_.size());
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = lam_jslog_[k] - lam_slog_[k] * jhat_;
    return g;
  }

  double jhat() const { return jhat_ + shift_; }
  std::span<const double> lam_slog() const { return lam_slog_; }
  std::vector<double> lam_jslog() const {
    std::vector<double> out(lam_jslog_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = lam_jslog_[k] + shift_ * lam_slog_[k];
    return out;
  }
  std::size_t samples() const { return s_; }

 private:
  double shift_ = 0.0;
  double jhat_ = 0.0;
  std::vector<double> lam_slog_;
  std::vector<double> lam_jslog_;
  std::size_t s_ = 0;
};

using EstimatorAccumulators = LoorfAccumulator;

// ---------------------------------------------------------------------------
// Iterative Dirichlet copula (one coordinate)

/// Emits the n copula uniforms u~ of one coordinate one at a time. The
/// Gamma(n,1) total of the underlying exponentials is drawn up front; each
/// step draws one exponential conditioned on what remains of the total.
class DirichletCopula {
 public:
  DirichletCopula(int n, Rng& rng) : n_(n), total_(rng.gamma_int(n)), remaining_(total_) {
    if (n < 2) throw parameter_error("Dirichlet copula needs n >= 2");
  }

  /// Next exponential E^(s) (before normalization).
  double next_exponential(Rng& rng) {
    if (emitted_ >= n_) throw std::logic_error("DirichletCopula: all samples emitted");
    ++emitted_;
    double e;
    if (emitted_ < n_) {
      const double u = rng.uniform_open0();
      e = remaining_ - remaining_ * std::pow(u, 1.0 / static_cast<double>(n_ - emitted_));
    } else {
      e = remaining_;
    }
    remaining_ -= e;
    if (emitted_ == n_ || remaining_ < 0.0) remaining_ = std::max(remaining_, 0.0);
    if (emitted_ == n_) remaining_ = 0.0;
    return e;
  }

  /// Dirichlet component d^(s) = E^(s) / total.
  double next_dirichlet(Rng& rng) { return next_exponential(rng) / total_; }

  /// Copula uniform u~ = 1 - (1 - d)^(n-1), the Beta(1, n-1) marginal CDF.
  double next_uniform(Rng& rng) {
    const double d = next_dirichlet(rng);
    return 1.0 - std::pow(1.0 - d, static_cast<double>(n_ - 1));
  }

  int n() const { return n_; }
  int emitted() const { return emitted_; }
  double total() const { return total_; }
  double remaining() const { return remaining_; }

 private:
  int n_;
  int emitted_ = 0;
  double total_;
  double remaining_;
};

/// Pairwise correlation of the antithetic Bernoulli samples of one coordinate.
inline double arms_rho(double theta, int n) {
  if (n < 2) throw parameter_error("ARMS needs n >= 2");
  const double var = theta * (1.0 - theta);
  if (var <= 0.0) return 0.0;
  const double k = static_cast<double>(n - 1);
  const double q = theta > 0.5 ? 1.0 - theta : theta;
  const double joint = std::pow(std::max(0.0, 2.0 * std::pow(q, 1.0 / k) - 1.0), k);
  return (joint - q * q) / var;
}

/// Bernoulli draw from a copula uniform, with the antithetic flip for
/// theta <= 0.5.
inline bool arms_bit(double u_tilde, double theta) {
  return theta > 0.5 ? u_tilde <= theta : 1.0 - u_tilde <= theta;
}

// ---------------------------------------------------------------------------
// Estimators

template <DiscreteLoss F>
Estimate reinforce(const F& f, const Parametrization& param, const ParamVec& r, int n, Rng& rng) {
  if (n < 1) throw parameter_error("REINFORCE needs n >= 1");
  const Theta theta = param.forward(r);
  ReinforceAccumulator acc(r.values.size());
  BitVec z(theta.size());
  std::vector<double> score(r.values.size());
  for (int s = 0; s < n; ++s) {
    sample_bernoulli(theta, rng, z);
    param.score(r, theta, z, score);
    acc.add(f.eval(z), score);
  }
  return {acc.result(), acc.jhat()};
}

template <DiscreteLoss F>
Estimate loorf(const F& f, const Parametrization& param, const ParamVec& r, int n, Rng& rng) {
  if (n < 2) throw parameter_error("LOORF needs n >= 2");
  const Theta theta = param.forward(r);
  LoorfAccumulator acc(r.values.size());
  BitVec z(theta.size());
  std::vector<double> score(r.values.size());
  for (int s = 0; s < n; ++s) {
    sample_bernoulli(theta, rng, z);
    param.score(r, theta, z, score);
    acc.add(f.eval(z), score);
  }
  return {acc.result(), acc.jhat()};
}

/// Draws the n antithetic samples used by ARMS, one at a time, and hands
/// each to `visit(z)`.
template <class Visit>
void arms_samples(std::span<const double> theta, int n, Rng& rng, Visit&& visit) {
  std::vector<DirichletCopula> copulas;
  copulas.reserve(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) copulas.emplace_back(n, rng);
  BitVec z(theta.size());
  for (int s = 0; s < n; ++s) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      z.set(i, arms_bit(copulas[i].next_uniform(rng), theta[i]));
    }
    visit(z);
  }
}

template <DiscreteLoss F>
Estimate arms(const F& f, const Parametrization& param, const ParamVec& r, int n, Rng& rng) {
  if (n < 2) throw parameter_error("ARMS needs n >= 2");
  const Theta theta = param.forward(r);
  const std::size_t w = param.width();
  LoorfAccumulator acc(r.values.size());
  std::vector<double> score(r.values.size());
  arms_samples(theta, n, rng, [&](const BitVec& z) {
    param.score(r, theta, z, score);
    acc.add(f.eval(z), score);
  });
  GradEstimate g = acc.result();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double rho = arms_rho(theta[i], n);
    if (!(rho < 1.0)) throw std::domain_error("ARMS correlation reached 1");
    for (std::size_t c = 0; c < w; ++c) g[i * w + c] /= 1.0 - rho;
  }
  return {std::move(g), acc.jhat()};
}

/// beta*_i = E[J(z with coordinate i flipped)], the variance-optimal
/// constant baseline per coordinate, computed exactly.
inline std::vector<double> bstar_baselines(const TabularPB& f, std::span<const double> theta) {
  if (f.dim() > kBStarMaxDim) {
    throw capacity_error("beta* needs exact enumeration; d=" + std::to_string(f.dim()) +
                         " exceeds " + std::to_string(kBStarMaxDim));
  }
  std::vector<double> beta(f.dim());
  for (std::size_t i = 0; i < beta.size(); ++i) beta[i] = flipped_expectation(f, theta, i);
  return beta;
}

inline Estimate bstar(const TabularPB& f, const Parametrization& param, const ParamVec& r, int n,
                      Rng& rng) {
  if (n < 1) throw parameter_error("beta* needs n >= 1");
  const Theta theta = param.forward(r);
  const std::vector<double> beta = bstar_baselines(f, theta);
  const std::size_t w = param.width();
  GradEstimate g(r.values.size(), 0.0);
  std::vector<double> score(r.values.size());
  BitVec z(theta.size());
  double jsum = 0.0;
  for (int s = 0; s < n; ++s) {
    sample_bernoulli(theta, rng, z);
    param.score(r, theta, z, score);
    const double j = f.eval(z);
    jsum += j;
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += (j - beta[k / w]) * score[k];
  }
  for (double& v : g) v /= n;
  return {std::move(g), jsum / n};
}

/// Straight-through: sample z ~ Ber(sigmoid(r)) and return dJ/dz at z,
/// ignoring both the sampling step and the sigmoid derivative. Averages over
/// n draws.
template <SmoothLoss F>
Estimate straight_through(const F& f, const Parametrization& param, const ParamVec& r, Rng& rng,
                          int n = 1) {
  if constexpr (std::derived_from<F, PBFunction>) {
    if (!f.has_smooth()) throw capability_error("straight-through needs a smooth loss");
  }
  if (param.kind() != ParamKind::Sigmoid) {
    throw std::invalid_argument("straight-through is defined for the sigmoid parametrization");
  }
  if (n < 1) throw parameter_error("straight-through needs n >= 1");
  const Theta theta = param.forward(r);
  BitVec z(theta.size());
  std::vector<double> u(theta.size()), g(theta.size());
  GradEstimate out(theta.size(), 0.0);
  double jsum = 0.0;
  for (int s = 0; s < n; ++s) {
    sample_bernoulli(theta, rng, z);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = z[i];
    jsum += f.eval(z);
    f.grad_smooth(u, g);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += g[i] / n;
  }
  return {std::move(out), jsum / n};
}

/// Runtime dispatch over the estimator families. `table` is required for
/// beta*; the loss must be smooth for straight-through.
inline Estimate estimate(EstimatorKind kind, const PBFunction& f, const Parametrization& param,
                         const ParamVec& r, int n, Rng& rng, const TabularPB* table = nullptr) {
  switch (kind) {
    case EstimatorKind::Reinforce: return reinforce(f, param, r, n, rng);
    case EstimatorKind::Loorf: return loorf(f, param, r, n, rng);
    case EstimatorKind::Arms: return arms(f, param, r, n, rng);
    case EstimatorKind::BStar: {
      if (table == nullptr) throw capability_error("beta* requires a tabular loss");
      return bstar(*table, param, r, n, rng);
    }
    case EstimatorKind::StraightThrough: return straight_through(f, param, r, rng, n);
  }
  throw std::logic_error("unreachable");
}

}  // namespace pbopt

#endif  // PBOPT_ESTIMATORS_HPP
