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

// Benchmark losses: random exponential tables, a fixed-network loss, two
// one-dimensional continuation counter-examples, a Hamming-structured loss
// with a unique isolated minimum, a 2x2 checkerboard and masked regression.

#ifndef PBOPT_BENCHMARKS_HPP
#define PBOPT_BENCHMARKS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbopt/core.hpp"
#include "pbopt/error.hpp"
#include "pbopt/mlp.hpp"
#include "pbopt/rng.hpp"

namespace pbopt {

inline constexpr std::size_t kExpTabularMaxDim = 16;

// ---------------------------------------------------------------------------
// Tabular benchmarks

/// Maps raw values affinely so that the largest becomes -1 and the smallest +1.
inline TabularPB normalize_inverted(std::size_t d, std::vector<double> e) {
  const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
  const double mn = *lo, mx = *hi;
  if (!(mx > mn)) throw std::domain_error("cannot normalize a constant table");
  for (double& v : e) v = 1.0 - 2.0 * (v - mn) / (mx - mn);
  return TabularPB(d, std::move(e));
}

/// 2^d iid Exp(rate) draws mapped so that max -> -1 and min -> +1.
inline TabularPB make_exponential_tabular(std::size_t d, Rng& rng, double rate = 1.5) {
  if (d == 0 || d > kExpTabularMaxDim) {
    throw capacity_error("exponential tabular loss supports 1 <= d <= 16");
  }
  std::vector<double> e(std::size_t{1} << d);
  for (double& v : e) v = rng.exponential(rate);
  return normalize_inverted(d, std::move(e));
}

struct GenLossSpec {
  BitVec zstar;
  double m = -2.0;
  double M0 = 1.0;
  double dM = 1.0;
};

/// J(z*) = m; elsewhere J(z) = M0 - hamming(z, z*) * dM / d.
inline TabularPB make_genloss(const GenLossSpec& s) {
  const std::size_t d = s.zstar.size();
  if (d == 0 || d > kMaxTabularDim) throw capacity_error("genloss dimension out of range");
  if (!(s.dM > 0.0)) throw std::invalid_argument("genloss needs dM > 0");
  if (!(s.m < s.M0 - s.dM)) throw std::invalid_argument("genloss needs m < M0 - dM");
  std::vector<double> t(std::size_t{1} << d);
  for (std::uint64_t h = 0; h < t.size(); ++h) {
    const BitVec z = vertex_decode(h, d);
    const std::size_t dist = hamming(z, s.zstar);
    t[h] = dist == 0 ? s.m : s.M0 - static_cast<double>(dist) * s.dM / static_cast<double>(d);
  }
  return TabularPB(d, std::move(t));
}

/// Largest m for which every coordinate's descent direction still points to
/// z* when p(z*_j) = p for all j: M0 - dM / (d p^(d-1)).
inline double genloss_threshold(double M0, double dM, std::size_t d, double p) {
  return M0 - dM / (static_cast<double>(d) * std::pow(p, static_cast<double>(d - 1)));
}

/// Table (M, m, m, M) over vertices h = 0..3.
inline TabularPB make_checkerboard(double m, double M) {
  if (!(m < M)) throw std::invalid_argument("checkerboard needs m < M");
  return TabularPB(2, {M, m, m, M});
}

// ---------------------------------------------------------------------------
// Fixed-network loss

inline constexpr std::size_t kNNLossProbes = 1024;
inline constexpr std::size_t kNNLossHidden = 9;
inline constexpr std::size_t kNNLossWidth = 20;

/// z -> 2z - 1 -> 9 x (linear, frozen standardization, LeakyReLU) -> linear
/// -> frozen standardization.
class NNLoss final : public PBFunction {
 public:
  NNLoss(std::size_t d, Rng& rng) : d_(d) {
    if (d == 0) throw std::invalid_argument("NNLoss needs d >= 1");
    std::vector<std::size_t> widths{d};
    for (std::size_t l = 0; l < kNNLossHidden; ++l) widths.push_back(kNNLossWidth);
    widths.push_back(1);
    // Weights are drawn before the probe points.
    Rng weight_rng(rng(), 1);
    Rng probe_rng(rng(), 2);
    Matrix probes(kNNLossProbes, d);
    for (double& v : probes.v) v = 2.0 * probe_rng.uniform() - 1.0;
    net_ = FixedMLP(widths, weight_rng, probes);
  }

  std::size_t dim() const override { return d_; }
  double eval(const BitVec& z) const override { return eval_smooth(z.as_reals()); }
  bool has_smooth() const override { return true; }

  double eval_smooth(std::span<const double> u) const override {
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = 2.0 * u[i] - 1.0;
    return net_.forward(x);
  }

  void grad_smooth(std::span<const double> u, std::span<double> out) const override {
    std::vector<double> x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = 2.0 * u[i] - 1.0;
    net_.backward(x, out);
    for (double& g : out) g *= 2.0;
  }

  const FixedMLP& network() const { return net_; }

 private:
  std::size_t d_;
  FixedMLP net_;
};

inline std::unique_ptr<NNLoss> make_nnloss(std::size_t d, Rng& rng) {
  return std::make_unique<NNLoss>(d, rng);
}

// ---------------------------------------------------------------------------
// One-dimensional continuation counter-examples

enum class Counterexample { Ex31, Ex32 };

/// Ex31: slope -0.5 on [0,1] except slope +500 on [0.125,0.13) and
/// [0.87,0.875); J(0) = 0, J(1) = 4.505.
/// Ex32: -(u-0.4)^2 for u >= 0.4, -4(u-0.4)^2 below; C^1, J(0) = -0.64,
/// J(1) = -0.36, decreasing on (0.4, 1].
class CounterexampleLoss final : public PBFunction {
 public:
  static constexpr double kBaseSlope = 0.5;
  static constexpr double kSliverSlope = 500.0;
  static constexpr double kSliverA[2] = {0.125, 0.13};
  static constexpr double kSliverB[2] = {0.87, 0.875};
  static constexpr double kKink = 0.4;

  explicit CounterexampleLoss(Counterexample which) : which_(which) {}

  Counterexample which() const { return which_; }
  std::size_t dim() const override { return 1; }
  double eval(const BitVec& z) const override { return value(z[0] ? 1.0 : 0.0); }
  bool has_smooth() const override { return true; }
  double eval_smooth(std::span<const double> u) const override { return value(u[0]); }
  void grad_smooth(std::span<const double> u, std::span<double> out) const override {
    out[0] = derivative(u[0]);
  }

  double value(double u) const {
    if (which_ == Counterexample::Ex32) {
      const double e = u - kKink;
      return e >= 0.0 ? -e * e : -4.0 * e * e;
    }
    auto overlap = [u](const double* s) { return std::clamp(u, s[0], s[1]) - s[0]; };
    return -kBaseSlope * u + (kSliverSlope + kBaseSlope) * (overlap(kSliverA) + overlap(kSliverB));
  }

  double derivative(double u) const {
    if (which_ == Counterexample::Ex32) {
      const double e = u - kKink;
      return e >= 0.0 ? -2.0 * e : -8.0 * e;
    }
    auto inside = [u](const double* s) { return u >= s[0] && u < s[1]; };
    return inside(kSliverA) || inside(kSliverB) ? kSliverSlope : -kBaseSlope;
  }

 private:
  Counterexample which_;
};

inline std::unique_ptr<CounterexampleLoss> make_counterexample(Counterexample which) {
  return std::make_unique<CounterexampleLoss>(which);
}

// ---------------------------------------------------------------------------
// Masked regression

struct MaskedRegressionSpec {
  std::size_t input_dim = 10;
  std::size_t backbone_width = 20;
  std::size_t backbone_depth = 4;
  std::size_t target_width = 100;
  std::size_t target_depth = 5;
  std::size_t train_size = 2000;
  std::size_t valid_size = 1000;
  std::size_t batch_size = 100;
  std::size_t probe_size = 500;
};

class MaskedRegression;

/// The masked-backbone loss restricted to a fixed set of rows. Standardization
/// statistics are those of these rows.
class RowsView final : public PBFunction {
 public:
  RowsView(const MaskedRegression* owner, const Matrix* x, const std::vector<double>* t)
      : owner_(owner), x_(x), t_(t) {}

  std::size_t dim() const override;
  double eval(const BitVec& z) const override { return eval_smooth(z.as_reals()); }
  bool has_smooth() const override { return true; }
  double eval_smooth(std::span<const double> mask) const override;
  void grad_smooth(std::span<const double> mask, std::span<double> out) const override;

 private:
  const MaskedRegression* owner_;
  const Matrix* x_;
  const std::vector<double>* t_;
};

/// Binary weight mask over a fixed backbone, fit to a fixed target network by
/// mean absolute error. d = number of backbone weights.
class MaskedRegression final : public PBFunction {
 public:
  MaskedRegression(const MaskedRegressionSpec& spec, Rng& rng) : spec_(spec) {
    if (spec.batch_size == 0 || spec.train_size % spec.batch_size != 0) {
      throw std::invalid_argument("train_size must be a positive multiple of batch_size");
    }
    if (spec.probe_size == 0 || spec.probe_size > spec.train_size || spec.valid_size == 0) {
      throw std::invalid_argument("masked regression sizes");
    }
    Rng target_rng(rng(), 1), backbone_rng(rng(), 2), data_rng(rng(), 3);

    std::vector<Dense> target;
    std::size_t in = spec.input_dim;
    for (std::size_t l = 0; l < spec.target_depth; ++l) {
      target.push_back(Dense::sign_init(in, spec.target_width, target_rng));
      in = spec.target_width;
    }
    target.push_back(Dense::sign_init(in, 1, target_rng));
    const BatchNormMLP target_net(std::move(target));

    std::vector<Dense> backbone;
    in = spec.input_dim;
    for (std::size_t l = 0; l < spec.backbone_depth; ++l) {
      backbone.push_back(Dense::xavier_init(in, spec.backbone_width, backbone_rng));
      in = spec.backbone_width;
    }
    backbone.push_back(Dense::xavier_init(in, 1, backbone_rng));
    backbone_ = BatchNormMLP(std::move(backbone));

    auto sample = [&](std::size_t rows) {
      Matrix x(rows, spec.input_dim);
      for (double& v : x.v) v = 2.0 * data_rng.uniform() - 1.0;
      return x;
    };
    train_x_ = sample(spec.train_size);
    valid_x_ = sample(spec.valid_size);
    // One target function for both sets: normalization statistics come from
    // the union of their rows.
    Matrix all(spec.train_size + spec.valid_size, spec.input_dim);
    std::copy(train_x_.v.begin(), train_x_.v.end(), all.v.begin());
    std::copy(valid_x_.v.begin(), valid_x_.v.end(),
              all.v.begin() + static_cast<std::ptrdiff_t>(train_x_.v.size()));
    const std::vector<double> all_t = target_net.forward(all);
    train_t_.assign(all_t.begin(), all_t.begin() + static_cast<std::ptrdiff_t>(spec.train_size));
    valid_t_.assign(all_t.begin() + static_cast<std::ptrdiff_t>(spec.train_size), all_t.end());
    const auto [lo, hi] = std::minmax_element(train_t_.begin(), train_t_.end());
    const double mn = *lo, span_t = *hi - *lo;
    if (!(span_t > 0.0)) throw std::domain_error("target network output is constant");
    for (double& v : train_t_) v = (v - mn) / span_t;
    for (double& v : valid_t_) v = (v - mn) / span_t;

    const std::size_t nb = spec.train_size / spec.batch_size;
    batch_x_.resize(nb);
    batch_t_.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) slice(b * spec.batch_size, spec.batch_size, batch_x_[b], batch_t_[b]);
    slice(0, spec.probe_size, probe_x_, probe_t_);
  }

  MaskedRegression(const MaskedRegression&) = delete;
  MaskedRegression& operator=(const MaskedRegression&) = delete;

  const MaskedRegressionSpec& spec() const { return spec_; }
  const BatchNormMLP& backbone() const { return backbone_; }
  std::size_t dim() const override { return backbone_.weight_count(); }

  /// Loss over the full training set.
  double eval(const BitVec& z) const override { return eval_smooth(z.as_reals()); }
  bool has_smooth() const override { return true; }
  double eval_smooth(std::span<const double> mask) const override {
    return mae(train_x_, train_t_, mask);
  }
  void grad_smooth(std::span<const double> mask, std::span<double> out) const override {
    backbone_.mae_mask_grad(train_x_, train_t_, mask, out);
  }

  std::size_t batch_count() const { return batch_x_.size(); }
  RowsView batch(std::size_t b) const { return RowsView(this, &batch_x_.at(b), &batch_t_.at(b)); }
  RowsView probe() const { return RowsView(this, &probe_x_, &probe_t_); }
  RowsView validation() const { return RowsView(this, &valid_x_, &valid_t_); }

  double mae(const Matrix& x, std::span<const double> t, std::span<const double> mask) const {
    const std::vector<double> out = backbone_.forward(x, mask);
    double s = 0.0;
    for (std::size_t b = 0; b < out.size(); ++b) s += std::abs(out[b] - t[b]);
    return s / static_cast<double>(out.size());
  }

  double validation_loss(std::span<const double> mask) const { return mae(valid_x_, valid_t_, mask); }

  /// Normalized targets; the training ones span exactly [0, 1].
  std::span<const double> train_targets() const { return train_t_; }
  std::span<const double> valid_targets() const { return valid_t_; }
  const Matrix& train_inputs() const { return train_x_; }

 private:
  void slice(std::size_t begin, std::size_t rows, Matrix& x, std::vector<double>& t) const {
    x = Matrix(rows, spec_.input_dim);
    std::copy_n(train_x_.v.begin() + static_cast<std::ptrdiff_t>(begin * spec_.input_dim),
                rows * spec_.input_dim, x.v.begin());
    t.assign(train_t_.begin() + static_cast<std::ptrdiff_t>(begin),
             train_t_.begin() + static_cast<std::ptrdiff_t>(begin + rows));
  }

  MaskedRegressionSpec spec_;
  BatchNormMLP backbone_;
  Matrix train_x_, valid_x_, probe_x_;
  std::vector<double> train_t_, valid_t_, probe_t_;
  std::vector<Matrix> batch_x_;
  std::vector<std::vector<double>> batch_t_;
};

inline std::size_t RowsView::dim() const { return owner_->dim(); }
inline double RowsView::eval_smooth(std::span<const double> mask) const {
  return owner_->mae(*x_, *t_, mask);
}
inline void RowsView::grad_smooth(std::span<const double> mask, std::span<double> out) const {
  owner_->backbone().mae_mask_grad(*x_, *t_, mask, out);
}

inline std::unique_ptr<MaskedRegression> make_masked_regression(const MaskedRegressionSpec& spec,
                                                                Rng& rng) {
  return std::make_unique<MaskedRegression>(spec, rng);
}

/// Backbone weight count for the given spec.
inline std::size_t masked_regression_dim(const MaskedRegressionSpec& s) {
  const std::size_t w = s.backbone_width;
  return s.input_dim * w + (s.backbone_depth - 1) * w * w + w;
}

}  // namespace pbopt

#endif  // PBOPT_BENCHMARKS_HPP
