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

// Pseudo-Boolean function primitives: binary points, vertex indexing,
// tabulated losses, the multilinear polynomial form, and exact
// expectations/gradients under a factorized Bernoulli distribution.

#ifndef PBOPT_CORE_HPP
#define PBOPT_CORE_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbopt/error.hpp"

namespace pbopt {

/// Largest dimension a dense table may have (2^24 doubles = 128 MiB).
inline constexpr std::size_t kMaxTabularDim = 24;

/// A point of {0,1}^d.
class BitVec {
 public:
  BitVec() = default;
  explicit BitVec(std::size_t d) : bits_(d, 0) {}
  BitVec(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) {
      if (b != 0 && b != 1) throw std::invalid_argument("BitVec: entries must be 0 or 1");
      bits_.push_back(static_cast<std::uint8_t>(b));
    }
  }

  /// Little-endian decode: bit i of h is coordinate i.
  static BitVec from_index(std::uint64_t h, std::size_t d) {
    if (d < 64 && h >= (std::uint64_t{1} << d)) {
      throw std::out_of_range("vertex index " + std::to_string(h) + " out of range for d=" +
                              std::to_string(d));
    }
    BitVec z(d);
    for (std::size_t i = 0; i < d && i < 64; ++i) z.bits_[i] = (h >> i) & 1U;
    return z;
  }

  std::uint64_t index() const {
    if (bits_.size() > 63) throw std::overflow_error("BitVec::index: d > 63");
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) h |= std::uint64_t{bits_[i]} << i;
    return h;
  }

  std::size_t size() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1U; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::vector<double> as_reals() const { return {bits_.begin(), bits_.end()}; }

  bool operator==(const BitVec&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

inline BitVec vertex_decode(std::uint64_t h, std::size_t d) { return BitVec::from_index(h, d); }
inline std::uint64_t vertex_encode(const BitVec& z) { return z.index(); }

inline std::size_t hamming(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming: dimension mismatch");
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) count += a[i] != b[i];
  return count;
}

/// Anything that can be evaluated on a binary point.
template <class F>
concept DiscreteLoss = requires(const F& f, const BitVec& z) {
  { f.dim() } -> std::convertible_to<std::size_t>;
  { f.eval(z) } -> std::convertible_to<double>;
};

/// A loss that also has a differentiable extension to [0,1]^d.
template <class F>
concept SmoothLoss = DiscreteLoss<F> && requires(const F& f, std::span<const double> u,
                                                 std::span<double> g) {
  { f.eval_smooth(u) } -> std::convertible_to<double>;
  f.grad_smooth(u, g);
};

/// Runtime-polymorphic pseudo-Boolean function. Implementations must be
/// immutable after construction so that instances can be shared read-only.
class PBFunction {
 public:
  virtual ~PBFunction() = default;

  virtual std::size_t dim() const = 0;
  virtual double eval(const BitVec& z) const = 0;

  virtual bool has_smooth() const { return false; }
  virtual double eval_smooth(std::span<const double> /*u*/) const {
    throw capability_error("loss has no smooth extension");
  }
  virtual void grad_smooth(std::span<const double> /*u*/, std::span<double> /*out*/) const {
    throw capability_error("loss has no smooth extension");
  }
};

/// Dense table of J over all 2^d vertices, entry h = J(vertex_decode(h)).
class TabularPB final : public PBFunction {
 public:
  TabularPB(std::size_t d, std::vector<double> table) : d_(d), table_(std::move(table)) {
    if (d == 0) throw std::invalid_argument("TabularPB: d must be positive");
    if (d > kMaxTabularDim) {
      throw capacity_error("TabularPB: d=" + std::to_string(d) + " exceeds " +
                           std::to_string(kMaxTabularDim));
    }
    if (table_.size() != (std::size_t{1} << d)) {
      throw std::invalid_argument("TabularPB: table length must be 2^d");
    }
    for (double v : table_) {
      if (!std::isfinite(v)) throw std::invalid_argument("TabularPB: non-finite entry");
    }
  }

  /// Enumerate any discrete loss into a table.
  template <DiscreteLoss F>
  static TabularPB tabulate(const F& f) {
    const std::size_t d = f.dim();
    if (d > kMaxTabularDim) throw capacity_error("tabulate: dimension too large");
    std::vector<double> table(std::size_t{1} << d);
    for (std::uint64_t h = 0; h < table.size(); ++h) table[h] = f.eval(BitVec::from_index(h, d));
    return TabularPB(d, std::move(table));
  }

  std::size_t dim() const override { return d_; }
  double eval(const BitVec& z) const override {
    if (z.size() != d_) throw std::invalid_argument("TabularPB::eval: dimension mismatch");
    return table_[z.index()];
  }
  double value(std::uint64_t h) const { return table_[h]; }
  std::size_t size() const { return table_.size(); }
  std::span<const double> table() const { return table_; }

  double min_value() const { return *std::min_element(table_.begin(), table_.end()); }
  double max_value() const { return *std::max_element(table_.begin(), table_.end()); }
  std::uint64_t argmin() const {
    return static_cast<std::uint64_t>(std::min_element(table_.begin(), table_.end()) -
                                      table_.begin());
  }

 private:
  std::size_t d_;
  std::vector<double> table_;
};

// ---------------------------------------------------------------------------
// Binary persistence: u64 little-endian d, then 2^d little-endian doubles.

namespace detail {

inline void put_u64_le(std::ostream& os, std::uint64_t v) {
  unsigned char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = static_cast<unsigned char>(v >> (8 * k));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t get_u64_le(std::istream& is) {
  unsigned char buf[8];
  if (!is.read(reinterpret_cast<char*>(buf), 8)) throw std::runtime_error("truncated table file");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= std::uint64_t{buf[k]} << (8 * k);
  return v;
}

}  // namespace detail

inline void write_table(std::ostream& os, const TabularPB& f) {
  detail::put_u64_le(os, f.dim());
  for (double v : f.table()) detail::put_u64_le(os, std::bit_cast<std::uint64_t>(v));
}

inline TabularPB read_table(std::istream& is) {
  const std::uint64_t d = detail::get_u64_le(is);
  if (d == 0 || d > kMaxTabularDim) throw capacity_error("table file: unsupported dimension");
  std::vector<double> table(std::size_t{1} << d);
  for (double& v : table) v = std::bit_cast<double>(detail::get_u64_le(is));
  return TabularPB(d, std::move(table));
}

inline void save_table(const std::string& path, const TabularPB& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_table(os, f);
}

inline TabularPB load_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_table(is);
}

// ---------------------------------------------------------------------------
// Multilinear polynomial form: J(z) = sum_S w_S prod_{i in S} z_i.

class MultilinearPoly final : public PBFunction {
 public:
  MultilinearPoly(std::size_t d, std::map<std::uint64_t, double> weights)
      : d_(d), weights_(std::move(weights)) {}

  std::size_t dim() const override { return d_; }
  const std::map<std::uint64_t, double>& weights() const { return weights_; }

  /// Coefficient of the subset given as a bitmask (absent entries are zero).
  double weight(std::uint64_t subset) const {
    auto it = weights_.find(subset);
    return it == weights_.end() ? 0.0 : it->second;
  }

  std::size_t degree() const {
    std::size_t deg = 0;
    for (const auto& [mask, w] : weights_) {
      if (w != 0.0) deg = std::max<std::size_t>(deg, std::popcount(mask));
    }
    return deg;
  }

  double eval(const BitVec& z) const override {
    const std::uint64_t h = z.index();
    double total = 0.0;
    for (const auto& [mask, w] : weights_) {
      if ((mask & h) == mask) total += w;
    }
    return total;
  }

  bool has_smooth() const override { return true; }

  double eval_smooth(std::span<const double> u) const override {
    double total = 0.0;
    for (const auto& [mask, w] : weights_) total += w * monomial(mask, u, d_);
    return total;
  }

  void grad_smooth(std::span<const double> u, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [mask, w] : weights_) {
      for (std::size_t i = 0; i < d_; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        if (mask & bit) out[i] += w * monomial(mask & ~bit, u, d_);
      }
    }
  }

 private:
  static double monomial(std::uint64_t mask, std::span<const double> u, std::size_t d) {
    double p = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask >> i & 1U) p *= u[i];
    }
    return p;
  }

  std::size_t d_;
  std::map<std::uint64_t, double> weights_;
};

/// Moebius transform of the table: w_S = sum_{T subset S} (-1)^{|S|-|T|} J(T).
inline MultilinearPoly to_multilinear(const TabularPB& f) {
  const std::size_t d = f.dim();
  std::vector<double> a(f.table().begin(), f.table().end());
  for (std::size_t i = 0; i < d; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t h = 0; h < a.size(); ++h) {
      if (h & bit) a[h] -= a[h ^ bit];
    }
  }
  std::map<std::uint64_t, double> weights;
  for (std::uint64_t h = 0; h < a.size(); ++h) {
    if (a[h] != 0.0) weights.emplace(h, a[h]);
  }
  return MultilinearPoly(d, std::move(weights));
}

// ---------------------------------------------------------------------------
// Exact quantities under z_i ~ Ber(theta_i) independently.

/// p_theta(vertex h); 0^0 is taken as 1.
inline double vertex_probability(std::uint64_t h, std::span<const double> theta) {
  double p = 1.0;
  for (std::size_t i = 0; i < theta.size(); ++i) p *= (h >> i & 1U) ? theta[i] : 1.0 - theta[i];
  return p;
}

inline void check_theta(std::span<const double> theta, std::size_t d) {
  if (theta.size() != d) throw std::invalid_argument("theta has wrong dimension");
  for (double t : theta) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("theta outside [0,1]");
  }
}

/// E_{z ~ p_theta}[J(z)] by enumeration of all 2^d vertices.
inline double exact_expectation(const TabularPB& f, std::span<const double> theta) {
  check_theta(theta, f.dim());
  double total = 0.0;
  for (std::uint64_t h = 0; h < f.size(); ++h) total += vertex_probability(h, theta) * f.value(h);
  return total;
}

/// Gradient w.r.t. theta of the expectation. Coordinate i is
/// E_{j != i}[J(z_i = 1)] - E_{j != i}[J(z_i = 0)].
inline std::vector<double> exact_gradient(const TabularPB& f, std::span<const double> theta) {
  const std::size_t d = f.dim();
  check_theta(theta, d);
  std::vector<double> grad(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t h = 0; h < f.size(); ++h) {
      if (h & bit) continue;
      double w = 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != i) w *= (h >> j & 1U) ? theta[j] : 1.0 - theta[j];
      }
      acc += w * (f.value(h | bit) - f.value(h));
    }
    grad[i] = acc;
  }
  return grad;
}

/// E_{z ~ p_theta}[J(z with coordinate i flipped)].
inline double flipped_expectation(const TabularPB& f, std::span<const double> theta,
                                  std::size_t i) {
  check_theta(theta, f.dim());
  if (i >= f.dim()) throw std::out_of_range("flipped_expectation: coordinate out of range");
  const std::uint64_t bit = std::uint64_t{1} << i;
  double total = 0.0;
  for (std::uint64_t h = 0; h < f.size(); ++h) {
    total += vertex_probability(h, theta) * f.value(h ^ bit);
  }
  return total;
}

/// J(..., z_i = 1, ...) - J(..., z_i = 0, ...), coordinate i zero-based.
template <DiscreteLoss F>
double pb_derivative(const F& f, const BitVec& z, std::size_t i) {
  if (z.size() != f.dim()) throw std::invalid_argument("pb_derivative: dimension mismatch");
  if (i >= z.size()) throw std::out_of_range("pb_derivative: coordinate out of range");
  BitVec hi = z, lo = z;
  hi.set(i, true);
  lo.set(i, false);
  return f.eval(hi) - f.eval(lo);
}

/// Entropy of the factorized Bernoulli in nats, with 0 log 0 = 0.
inline double entropy(std::span<const double> theta) {
  auto term = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  double total = 0.0;
  for (double t : theta) total += term(t) + term(1.0 - t);
  return total;
}

}  // namespace pbopt

#endif  // PBOPT_CORE_HPP
