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

// Small dense networks with hand-written backpropagation. Layers have no
// bias; every hidden layer is linear -> standardization -> LeakyReLU.

#ifndef PBOPT_MLP_HPP
#define PBOPT_MLP_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pbopt/rng.hpp"

namespace pbopt {

inline constexpr double kNormEps = 1e-5;
inline constexpr double kLeakySlope = 0.01;

inline double leaky(double v) { return v > 0.0 ? v : kLeakySlope * v; }
inline double leaky_slope(double v) { return v > 0.0 ? 1.0 : kLeakySlope; }

/// Bias-free dense layer, weights row-major (out x in).
struct Dense {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> w;

  static Dense sign_init(std::size_t in, std::size_t out, Rng& rng) {
    Dense l{in, out, std::vector<double>(in * out)};
    for (double& v : l.w) v = rng.bernoulli(0.5) ? 1.0 : -1.0;
    return l;
  }

  /// Xavier-normal: N(0, 2 / (in + out)).
  static Dense xavier_init(std::size_t in, std::size_t out, Rng& rng) {
    Dense l{in, out, std::vector<double>(in * out)};
    const double sd = std::sqrt(2.0 / static_cast<double>(in + out));
    for (double& v : l.w) v = sd * rng.normal();
    return l;
  }
};

/// Row-major B x cols matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> v;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(v).subspan(r * cols, cols);
  }
};

/// Y = X * W^T for a batch.
inline Matrix linear_forward(const Matrix& x, std::span<const double> w, std::size_t out) {
  const std::size_t in = x.cols;
  Matrix y(x.rows, out);
  for (std::size_t b = 0; b < x.rows; ++b) {
    const double* xr = &x.v[b * in];
    double* yr = &y.v[b * out];
    for (std::size_t o = 0; o < out; ++o) {
      const double* wr = &w[o * in];
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
      yr[o] = acc;
    }
  }
  return y;
}

/// Per-column population mean and variance.
inline void column_stats(const Matrix& a, std::vector<double>& mean, std::vector<double>& var) {
  mean.assign(a.cols, 0.0);
  var.assign(a.cols, 0.0);
  const double inv = 1.0 / static_cast<double>(a.rows);
  for (std::size_t b = 0; b < a.rows; ++b)
    for (std::size_t c = 0; c < a.cols; ++c) mean[c] += a.at(b, c);
  for (double& m : mean) m *= inv;
  for (std::size_t b = 0; b < a.rows; ++b)
    for (std::size_t c = 0; c < a.cols; ++c) {
      const double e = a.at(b, c) - mean[c];
      var[c] += e * e;
    }
  for (double& s : var) s *= inv;
}

/// Fixed network evaluated one input at a time with frozen standardization
/// statistics on every layer, including the scalar output.
class FixedMLP {
 public:
  FixedMLP() = default;

  /// widths = {input, hidden..., 1}. Weights are +-1; statistics come from a
  /// layer-by-layer pass over `probes`.
  FixedMLP(const std::vector<std::size_t>& widths, Rng& rng, const Matrix& probes) {
    if (widths.size() < 2 || widths.back() != 1) throw std::invalid_argument("FixedMLP widths");
    if (probes.cols != widths.front() || probes.rows < 2) {
      throw std::invalid_argument("FixedMLP probes shape");
    }
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      layers_.push_back(Dense::sign_init(widths[l], widths[l + 1], rng));
    }
    Matrix h = probes;
    mean_.resize(layers_.size());
    inv_sd_.resize(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      Matrix a = linear_forward(h, layers_[l].w, layers_[l].out);
      std::vector<double> var;
      column_stats(a, mean_[l], var);
      inv_sd_[l].resize(var.size());
      for (std::size_t c = 0; c < var.size(); ++c) inv_sd_[l][c] = 1.0 / std::sqrt(var[c] + kNormEps);
      const bool hidden = l + 1 < layers_.size();
      for (std::size_t b = 0; b < a.rows; ++b)
        for (std::size_t c = 0; c < a.cols; ++c) {
          const double n = (a.at(b, c) - mean_[l][c]) * inv_sd_[l][c];
          a.at(b, c) = hidden ? leaky(n) : n;
        }
      h = std::move(a);
    }
  }

  std::size_t input_dim() const { return layers_.front().in; }
  const std::vector<Dense>& layers() const { return layers_; }

  double forward(std::span<const double> x) const { return run(x, nullptr); }

  /// Gradient of the scalar output w.r.t. the input x.
  double backward(std::span<const double> x, std::span<double> grad) const {
    std::vector<std::vector<double>> normed;
    const double out = run(x, &normed);
    std::vector<double> g{inv_sd_.back()[0]};
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Dense& L = layers_[l];
      if (l + 1 < layers_.size()) {
        for (std::size_t o = 0; o < L.out; ++o) g[o] *= leaky_slope(normed[l][o]) * inv_sd_[l][o];
      }
      std::vector<double> gin(L.in, 0.0);
      for (std::size_t o = 0; o < L.out; ++o) {
        const double* wr = &L.w[o * L.in];
        for (std::size_t i = 0; i < L.in; ++i) gin[i] += wr[i] * g[o];
      }
      g = std::move(gin);
    }
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = g[i];
    return out;
  }

 private:
  double run(std::span<const double> x, std::vector<std::vector<double>>* normed) const {
    std::vector<double> h(x.begin(), x.end());
    if (normed) normed->resize(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const Dense& L = layers_[l];
      std::vector<double> a(L.out);
      for (std::size_t o = 0; o < L.out; ++o) {
        const double* wr = &L.w[o * L.in];
        double acc = 0.0;
        for (std::size_t i = 0; i < L.in; ++i) acc += wr[i] * h[i];
        a[o] = (acc - mean_[l][o]) * inv_sd_[l][o];
      }
      if (normed) (*normed)[l] = a;
      if (l + 1 < layers_.size()) {
        for (double& v : a) v = leaky(v);
      }
      h = std::move(a);
    }
    return h[0];
  }

  std::vector<Dense> layers_;
  std::vector<std::vector<double>> mean_;
  std::vector<std::vector<double>> inv_sd_;
};

/// Network whose hidden layers standardize with the statistics of the batch
/// being evaluated (no affine terms, no moving statistics); the output layer
/// is plain linear. Weights may be scaled by a per-weight mask.
class BatchNormMLP {
 public:
  BatchNormMLP() = default;
  explicit BatchNormMLP(std::vector<Dense> layers) : layers_(std::move(layers)) {
    if (layers_.empty() || layers_.back().out != 1) throw std::invalid_argument("BatchNormMLP shape");
    for (const Dense& l : layers_) weight_count_ += l.w.size();
  }

  const std::vector<Dense>& layers() const { return layers_; }
  std::size_t weight_count() const { return weight_count_; }
  std::size_t input_dim() const { return layers_.front().in; }

  /// Outputs for every row of x; `mask` (size weight_count() or empty) scales
  /// weights element-wise in layer order, row-major within a layer.
  std::vector<double> forward(const Matrix& x, std::span<const double> mask = {}) const {
    Tape tape;
    return run(x, mask, tape, false);
  }

  /// Gradient of mean |out - target| w.r.t. the mask. Returns the loss.
  double mae_mask_grad(const Matrix& x, std::span<const double> target,
                       std::span<const double> mask, std::span<double> grad) const {
    Tape tape;
    const std::vector<double> out = run(x, mask, tape, true);
    const std::size_t B = x.rows;
    double loss = 0.0;
    Matrix d(B, 1);
    for (std::size_t b = 0; b < B; ++b) {
      const double e = out[b] - target[b];
      loss += std::abs(e);
      d.v[b] = (e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0)) / static_cast<double>(B);
    }
    std::size_t offset = weight_count_;
    for (std::size_t l = layers_.size(); l-- > 0;) {
      const Dense& L = layers_[l];
      offset -= L.w.size();
      if (l + 1 < layers_.size()) {
        // LeakyReLU then standardization backward:
        // da = inv_sd * (dy - mean(dy) - y * mean(dy * y)).
        const Matrix& y = tape.normed[l];
        for (std::size_t i = 0; i < d.v.size(); ++i) d.v[i] *= leaky_slope(y.v[i]);
        for (std::size_t c = 0; c < L.out; ++c) {
          double mdy = 0.0, mdyy = 0.0;
          for (std::size_t b = 0; b < B; ++b) {
            mdy += d.at(b, c);
            mdyy += d.at(b, c) * y.at(b, c);
          }
          mdy /= static_cast<double>(B);
          mdyy /= static_cast<double>(B);
          for (std::size_t b = 0; b < B; ++b) {
            d.at(b, c) = tape.inv_sd[l][c] * (d.at(b, c) - mdy - y.at(b, c) * mdyy);
          }
        }
      }
      const Matrix& xin = tape.inputs[l];
      const std::vector<double>& weff = tape.weff[l];
      for (std::size_t o = 0; o < L.out; ++o)
        for (std::size_t i = 0; i < L.in; ++i) {
          double acc = 0.0;
          for (std::size_t b = 0; b < B; ++b) acc += d.at(b, o) * xin.at(b, i);
          grad[offset + o * L.in + i] = acc * L.w[o * L.in + i];
        }
      if (l == 0) break;
      Matrix dx(B, L.in);
      for (std::size_t b = 0; b < B; ++b)
        for (std::size_t o = 0; o < L.out; ++o) {
          const double g = d.at(b, o);
          if (g == 0.0) continue;
          const double* wr = &weff[o * L.in];
          for (std::size_t i = 0; i < L.in; ++i) dx.at(b, i) += g * wr[i];
        }
      d = std::move(dx);
    }
    return loss / static_cast<double>(B);
  }

 private:
  struct Tape {
    std::vector<Matrix> inputs;
    std::vector<Matrix> normed;
    std::vector<std::vector<double>> inv_sd;
    std::vector<std::vector<double>> weff;
  };

  std::vector<double> run(const Matrix& x, std::span<const double> mask, Tape& tape,
                          bool record) const {
    if (x.cols != input_dim()) throw std::invalid_argument("BatchNormMLP: input width");
    if (!mask.empty() && mask.size() != weight_count_) {
      throw std::invalid_argument("BatchNormMLP: mask size");
    }
    Matrix h = x;
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const Dense& L = layers_[l];
      std::vector<double> weff = L.w;
      if (!mask.empty()) {
        for (std::size_t k = 0; k < weff.size(); ++k) weff[k] *= mask[offset + k];
      }
      offset += L.w.size();
      Matrix a = linear_forward(h, weff, L.out);
      if (record) {
        tape.inputs.push_back(std::move(h));
        tape.weff.push_back(std::move(weff));
      }
      if (l + 1 < layers_.size()) {
        std::vector<double> mean, var;
        column_stats(a, mean, var);
        std::vector<double> inv_sd(var.size());
        for (std::size_t c = 0; c < var.size(); ++c) inv_sd[c] = 1.0 / std::sqrt(var[c] + kNormEps);
        for (std::size_t b = 0; b < a.rows; ++b)
          for (std::size_t c = 0; c < a.cols; ++c) a.at(b, c) = (a.at(b, c) - mean[c]) * inv_sd[c];
        if (record) {
          tape.normed.push_back(a);
          tape.inv_sd.push_back(std::move(inv_sd));
        }
        for (double& v : a.v) v = leaky(v);
      }
      h = std::move(a);
    }
    return h.v;
  }

  std::vector<Dense> layers_;
  std::size_t weight_count_ = 0;
};

}  // namespace pbopt

#endif  // PBOPT_MLP_HPP
