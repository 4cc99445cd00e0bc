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

// Estimator variance, exactly (by enumerating sample multisets) or by Monte
// Carlo.
//
// Every estimator here is a symmetric function of its n samples, so
// E[g^2] only needs one evaluation per multiset of vertices, weighted by the
// number of orderings of that multiset times the probability of any one
// ordering. Under iid sampling that probability is the product of vertex
// probabilities. Under ARMS the samples of one coordinate are exchangeable
// and coordinates are independent, so an ordering with k_i ones in
// coordinate i has probability prod_i q_{k_i}(theta_i), with q from the
// closed-form n = 4 table below.

#ifndef PBOPT_VARLAB_HPP
#define PBOPT_VARLAB_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbopt/core.hpp"
#include "pbopt/error.hpp"
#include "pbopt/estimators.hpp"
#include "pbopt/params.hpp"
#include "pbopt/rng.hpp"

namespace pbopt {

inline constexpr std::uint64_t kMaxMultisets = 1'000'000;

/// C(alphabet - 1 + n, n), saturating at uint64 max.
inline std::uint64_t multiset_count(std::uint64_t alphabet, std::uint64_t n) {
  if (alphabet == 0) return n == 0 ? 1 : 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= n; ++i) {
    std::uint64_t num;
    if (__builtin_mul_overflow(r, alphabet - 1 + i, &num)) return std::numeric_limits<std::uint64_t>::max();
    r = num / i;
  }
  return r;
}

/// Visits the multisets of size n over {0..alphabet-1} as non-decreasing
/// sequences, in lexicographic order.
class MultisetIterator {
 public:
  MultisetIterator(std::uint64_t alphabet, int n) : alphabet_(alphabet), items_(static_cast<std::size_t>(n), 0) {
    if (alphabet == 0 || n < 1) throw parameter_error("multiset enumeration needs alphabet, n >= 1");
  }

  const std::vector<std::uint64_t>& items() const { return items_; }

  bool next() {
    for (std::size_t j = items_.size(); j-- > 0;) {
      if (items_[j] + 1 < alphabet_) {
        const std::uint64_t v = items_[j] + 1;
        for (std::size_t k = j; k < items_.size(); ++k) items_[k] = v;
        return true;
      }
    }
    return false;
  }

  /// n! / prod_h m_h!, the number of distinct orderings.
  double permutations() const {
    double r = 1.0;
    std::size_t run = 1;
    for (std::size_t k = 1; k <= items_.size(); ++k) {
      r *= static_cast<double>(k);
      if (k < items_.size() && items_[k] == items_[k - 1]) {
        ++run;
      } else {
        for (std::size_t m = 2; m <= run; ++m) r /= static_cast<double>(m);
        run = 1;
      }
    }
    return r;
  }

 private:
  std::uint64_t alphabet_;
  std::vector<std::uint64_t> items_;
};

// ---------------------------------------------------------------------------
// Closed-form ARMS joint probabilities, n = 4

/// Probability that four Dirichlet(1,1,1,1) components fall so that exactly
/// the k designated ones are below t and the other 4 - k are above it, for a
/// fixed designation. Piecewise cubic with breaks at 1/4, 1/3, 1/2.
inline double arms_table_raw(int k, double t) {
  const double t2 = t * t, t3 = t2 * t;
  const int piece = t < 0.25 ? 0 : (t < 1.0 / 3.0 ? 1 : (t < 0.5 ? 2 : 3));
  switch (k) {
    case 0: return piece == 0 ? -std::pow(4.0 * t - 1.0, 3) : 0.0;
    case 1:
      if (piece == 0) return t * (37.0 * t2 - 21.0 * t + 3.0);
      if (piece == 1) return -std::pow(3.0 * t - 1.0, 3);
      return 0.0;
    case 2:
      if (piece == 0) return 6.0 * (1.0 - 3.0 * t) * t2;
      if (piece == 1) return 46.0 * t3 - 42.0 * t2 + 12.0 * t - 1.0;
      if (piece == 2) return -std::pow(2.0 * t - 1.0, 3);
      return 0.0;
    case 3:
      if (piece == 0) return 6.0 * t3;
      if (piece == 1) return -58.0 * t3 + 48.0 * t2 - 12.0 * t + 1.0;
      if (piece == 2) return 23.0 * t3 - 33.0 * t2 + 15.0 * t - 2.0;
      return -std::pow(t - 1.0, 3);
    case 4:
      if (piece == 0) return 0.0;
      if (piece == 1) return std::pow(4.0 * t - 1.0, 3);
      if (piece == 2) return -44.0 * t3 + 60.0 * t2 - 24.0 * t + 3.0;
      return 4.0 * t3 - 12.0 * t2 + 12.0 * t - 3.0;
    default: throw std::out_of_range("arms_table_raw: k must be in [0,4]");
  }
}

/// Inverse of the Beta(1, n-1) marginal CDF of a Dirichlet component.
inline double dirichlet_marginal_quantile(double p, int n) {
  return 1.0 - std::pow(1.0 - p, 1.0 / static_cast<double>(n - 1));
}

/// Probability of one ordered ARMS sample sequence (n = 4) of a coordinate
/// with success probability theta that contains k ones.
inline double arms_sequence_probability(int k, double theta) {
  if (k < 0 || k > 4) throw std::out_of_range("arms_sequence_probability: k must be in [0,4]");
  if (theta <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (theta >= 1.0) return k == 4 ? 1.0 : 0.0;
  if (theta > 0.5) return arms_table_raw(k, dirichlet_marginal_quantile(theta, 4));
  return arms_table_raw(4 - k, dirichlet_marginal_quantile(1.0 - theta, 4));
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---------------------------------------------------------------------------
// Exact variance

enum class VarEstimator { Reinforce, Loorf, Arms, BStar };

inline std::string_view to_string(VarEstimator k) {
  switch (k) {
    case VarEstimator::Reinforce: return "reinforce";
    case VarEstimator::Loorf: return "loorf";
    case VarEstimator::Arms: return "arms";
    case VarEstimator::BStar: return "bstar";
  }
  return "?";
}

struct VarianceResult {
  std::vector<double> per_coord;
  double sum = 0.0;
};

/// Evaluates one estimator on a fixed sample sequence (vertex indices), with
/// scores from `param` at r. `baseline` applies to REINFORCE only.
class SampleEstimator {
 public:
  SampleEstimator(const TabularPB& f, const Parametrization& param, const ParamVec& r,
                  VarEstimator kind, int n, double baseline = 0.0)
      : f_(f), kind_(kind), n_(n), baseline_(baseline), width_(param.width()),
        size_(r.values.size()) {
    if (n < 1 || ((kind != VarEstimator::Reinforce && kind != VarEstimator::BStar) && n < 2)) {
      throw parameter_error("estimator needs more samples");
    }
    const Theta theta = param.forward(r);
    scores_.resize(f.size() * size_);
    for (std::uint64_t h = 0; h < f.size(); ++h) {
      param.score(r, theta, vertex_decode(h, f.dim()),
                  std::span<double>(scores_).subspan(h * size_, size_));
    }
    if (kind == VarEstimator::BStar) beta_ = bstar_baselines(f, theta);
    if (kind == VarEstimator::Arms) {
      scale_.resize(theta.size());
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double rho = arms_rho(theta[i], n);
        if (!(rho < 1.0)) throw std::domain_error("ARMS correlation reached 1");
        scale_[i] = 1.0 / (1.0 - rho);
      }
    }
  }

  std::size_t size() const { return size_; }

  void operator()(std::span<const std::uint64_t> samples, std::span<double> out) const {
    switch (kind_) {
      case VarEstimator::Reinforce:
      case VarEstimator::BStar: {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::uint64_t h : samples) {
          const double j = f_.value(h);
          const double* s = &scores_[h * size_];
          for (std::size_t k = 0; k < size_; ++k) {
            const double b = kind_ == VarEstimator::BStar ? beta_[k / width_] : baseline_;
            out[k] += (j - b) * s[k];
          }
        }
        for (double& v : out) v /= static_cast<double>(samples.size());
        return;
      }
      case VarEstimator::Loorf:
      case VarEstimator::Arms: {
        LoorfAccumulator acc(size_);
        for (std::uint64_t h : samples) {
          acc.add(f_.value(h), std::span<const double>(scores_).subspan(h * size_, size_));
        }
        const GradEstimate g = acc.result();
        for (std::size_t k = 0; k < size_; ++k) {
          out[k] = kind_ == VarEstimator::Arms ? g[k] * scale_[k / width_] : g[k];
        }
        return;
      }
    }
  }

 private:
  const TabularPB& f_;
  VarEstimator kind_;
  int n_;
  double baseline_;
  std::size_t width_;
  std::size_t size_;
  std::vector<double> scores_;
  std::vector<double> beta_;
  std::vector<double> scale_;
};

/// Exact gradient of E[J] w.r.t. r.
inline GradEstimate exact_gradient_r(const TabularPB& f, const Parametrization& param,
                                     const ParamVec& r) {
  const Theta theta = param.forward(r);
  return param.chain(r, exact_gradient(f, theta));
}

/// Exact per-coordinate variance of an estimator w.r.t. r, as
/// sum_w (g - grad)^2 over sample multisets. Iid sampling except for ARMS,
/// which uses the closed-form n = 4 joint probabilities.
inline VarianceResult exact_variance(const TabularPB& f, VarEstimator kind,
                                     const Parametrization& param, const ParamVec& r, int n,
                                     double baseline = 0.0) {
  if (kind == VarEstimator::Arms && n != 4) {
    throw parameter_error("exact ARMS variance is tabulated for n = 4 only");
  }
  if (n < 1) throw parameter_error("n must be >= 1");
  const std::uint64_t count = multiset_count(f.size(), static_cast<std::uint64_t>(n));
  if (count > kMaxMultisets) {
    throw capacity_error("exact variance would enumerate " + std::to_string(count) +
                         " multisets (limit " + std::to_string(kMaxMultisets) + ")");
  }
  const Theta theta = param.forward(r);
  const std::size_t d = f.dim();
  const SampleEstimator est(f, param, r, kind, n, baseline);
  const GradEstimate grad = exact_gradient_r(f, param, r);

  std::vector<double> vprob(f.size());
  for (std::uint64_t h = 0; h < f.size(); ++h) vprob[h] = vertex_probability(h, theta);
  // q[i][k]: ARMS probability of one ordering with k ones in coordinate i.
  std::vector<std::array<double, 5>> q(d);
  if (kind == VarEstimator::Arms) {
    for (std::size_t i = 0; i < d; ++i)
      for (int k = 0; k <= 4; ++k) q[i][static_cast<std::size_t>(k)] = arms_sequence_probability(k, theta[i]);
  }

  VarianceResult res;
  res.per_coord.assign(est.size(), 0.0);
  std::vector<double> g(est.size());
  std::vector<int> ones(d);
  MultisetIterator it(f.size(), n);
  do {
    const auto& items = it.items();
    double p = it.permutations();
    if (kind == VarEstimator::Arms) {
      std::fill(ones.begin(), ones.end(), 0);
      for (std::uint64_t h : items)
        for (std::size_t i = 0; i < d; ++i) ones[i] += static_cast<int>((h >> i) & 1U);
      for (std::size_t i = 0; i < d; ++i) p *= q[i][static_cast<std::size_t>(ones[i])];
    } else {
      for (std::uint64_t h : items) p *= vprob[h];
    }
    if (p == 0.0) continue;
    est(items, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double e = g[k] - grad[k];
      res.per_coord[k] += p * e * e;
    }
  } while (it.next());
  for (double v : res.per_coord) res.sum += v;
  return res;
}

/// Theta-space variance (scores of the direct parametrization at r = theta).
inline VarianceResult exact_variance_iid(const TabularPB& f, VarEstimator kind,
                                         std::span<const double> theta, int n,
                                         double baseline = 0.0) {
  if (kind == VarEstimator::Arms) throw std::invalid_argument("use exact_variance_arms for ARMS");
  const Parametrization direct(ParamKind::Direct, 4.0, 0.0);
  return exact_variance(f, kind, direct, ParamVec{ParamKind::Direct, {theta.begin(), theta.end()}},
                        n, baseline);
}

inline VarianceResult exact_variance_arms(const TabularPB& f, std::span<const double> theta,
                                          int n = 4) {
  if (f.dim() > 4) throw capacity_error("exact ARMS variance supports d <= 4");
  const Parametrization direct(ParamKind::Direct, 4.0, 0.0);
  return exact_variance(f, VarEstimator::Arms, direct,
                        ParamVec{ParamKind::Direct, {theta.begin(), theta.end()}}, n);
}

/// Monte Carlo variance of the estimator output w.r.t. r over `reps`
/// evaluations: mean of (g - ref)^2 with ref the exact gradient when `table`
/// is given (and small enough), else the sample mean of g.
inline VarianceResult mc_variance(const PBFunction& f, EstimatorKind kind,
                                  const Parametrization& param, const ParamVec& r, int n, int reps,
                                  Rng& rng, const TabularPB* table = nullptr) {
  if (reps < 2) throw parameter_error("mc_variance needs reps >= 2");
  const std::size_t size = r.values.size();
  std::vector<double> sum(size, 0.0), sumsq(size, 0.0);
  for (int k = 0; k < reps; ++k) {
    const Estimate e = estimate(kind, f, param, r, n, rng, table);
    for (std::size_t c = 0; c < size; ++c) {
      sum[c] += e.grad[c];
      sumsq[c] += e.grad[c] * e.grad[c];
    }
  }
  VarianceResult res;
  res.per_coord.resize(size);
  const double R = reps;
  const bool exact_ref = table != nullptr && kind != EstimatorKind::StraightThrough;
  const GradEstimate ref = exact_ref ? exact_gradient_r(*table, param, r) : GradEstimate{};
  for (std::size_t c = 0; c < size; ++c) {
    const double m = sum[c] / R;
    if (exact_ref) {
      res.per_coord[c] = sumsq[c] / R - 2.0 * ref[c] * m + ref[c] * ref[c];
    } else {
      res.per_coord[c] = (sumsq[c] - R * m * m) / (R - 1.0);
    }
    res.sum += res.per_coord[c];
  }
  return res;
}

// ---------------------------------------------------------------------------
// Variance along a descent trajectory

enum class TrajectorySpace { Theta, Sigmoid };

inline TrajectorySpace parse_trajectory_space(std::string_view s) {
  if (s == "theta") return TrajectorySpace::Theta;
  if (s == "sigmoid") return TrajectorySpace::Sigmoid;
  throw std::invalid_argument("unknown trajectory space '" + std::string(s) + "'");
}

struct TrajectoryConfig {
  int n = 4;
  double lr = 0.1;
  std::int64_t steps = 10000;
  std::int64_t log_every = 1;
  TrajectorySpace space = TrajectorySpace::Theta;
  bool exact = true;
  int mc_reps = 10000;
  double theta_clamp = 1e-6;
};

struct VarianceRow {
  std::int64_t step = 0;
  double exact_loss = 0.0;
  double entropy = 0.0;
  double theta_mean = 0.0;
  // Indexed by VarEstimator.
  std::array<double, 4> var_sum{};
};

/// Follows exact-gradient descent from theta = 0.5 and logs the summed
/// variance of every estimator in the descent's own coordinates (theta, or
/// sigmoid logits r). Rows at step 0, every log_every steps and the last step.
inline std::vector<VarianceRow> variance_trajectory(const TabularPB& f, const TrajectoryConfig& cfg,
                                                    Rng* rng = nullptr) {
  if (cfg.steps < 0 || cfg.log_every < 1) throw parameter_error("bad trajectory length");
  if (!cfg.exact && rng == nullptr) throw std::invalid_argument("Monte Carlo variance needs an rng");
  const std::size_t d = f.dim();
  const bool in_theta = cfg.space == TrajectorySpace::Theta;
  const Parametrization param = in_theta ? Parametrization(ParamKind::Direct, 4.0, cfg.theta_clamp)
                                         : Parametrization(ParamKind::Sigmoid);
  ParamVec r = param.inverse(Theta::uniform(d).probs);

  std::vector<VarianceRow> rows;
  auto log = [&](std::int64_t step) {
    const Theta theta = param.forward(r);
    VarianceRow row;
    row.step = step;
    row.exact_loss = exact_expectation(f, theta);
    row.entropy = entropy(theta);
    double s = 0.0;
    for (double t : theta.probs) s += t;
    row.theta_mean = s / static_cast<double>(d);
    constexpr VarEstimator kinds[4] = {VarEstimator::Reinforce, VarEstimator::Loorf,
                                       VarEstimator::Arms, VarEstimator::BStar};
    constexpr EstimatorKind mc_kinds[4] = {EstimatorKind::Reinforce, EstimatorKind::Loorf,
                                           EstimatorKind::Arms, EstimatorKind::BStar};
    for (std::size_t k = 0; k < 4; ++k) {
      if (cfg.exact) {
        row.var_sum[k] = exact_variance(f, kinds[k], param, r, cfg.n).sum;
      } else {
        row.var_sum[k] = mc_variance(f, mc_kinds[k], param, r, cfg.n, cfg.mc_reps, *rng, &f).sum;
      }
    }
    rows.push_back(row);
  };

  log(0);
  for (std::int64_t step = 1; step <= cfg.steps; ++step) {
    const GradEstimate g = exact_gradient_r(f, param, r);
    for (std::size_t k = 0; k < g.size(); ++k) r.values[k] -= cfg.lr * g[k];
    param.project(r);
    if (step % cfg.log_every == 0 || step == cfg.steps) log(step);
  }
  return rows;
}

}  // namespace pbopt

#endif  // PBOPT_VARLAB_HPP
