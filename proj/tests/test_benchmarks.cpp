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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "pbopt/pbopt.hpp"

namespace pbopt {
namespace {

TEST(ExponentialTabular, RangeIsExactlyMinusOneToOne) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const TabularPB f = make_exponential_tabular(8, rng);
    EXPECT_EQ(f.min_value(), -1.0);
    EXPECT_EQ(f.max_value(), 1.0);
  }
}

TEST(ExponentialTabular, ReversesRanks) {
  Rng a(3), b(3);
  const TabularPB f = make_exponential_tabular(6, a);
  std::vector<double> raw(64);
  for (double& v : raw) v = b.exponential(1.5);
  for (std::size_t h = 0; h < 64; ++h) {
    for (std::size_t k = 0; k < 64; ++k) {
      if (raw[h] > raw[k]) {
        ASSERT_LT(f.value(h), f.value(k));
      }
    }
  }
}

TEST(ExponentialTabular, DegenerateDrawIsAnError) {
  EXPECT_THROW(normalize_inverted(2, std::vector<double>(4, 0.7)), std::domain_error);
}

TEST(ExponentialTabular, DimensionLimits) {
  Rng rng(1);
  EXPECT_THROW(make_exponential_tabular(17, rng), capacity_error);
  EXPECT_THROW(make_exponential_tabular(0, rng), capacity_error);
}

TEST(NNLoss, DeterministicForSeed) {
  Rng a(5), b(5);
  const TabularPB ta = TabularPB::tabulate(*make_nnloss(10, a));
  const TabularPB tb = TabularPB::tabulate(*make_nnloss(10, b));
  for (std::uint64_t h = 0; h < ta.size(); ++h) ASSERT_EQ(ta.value(h), tb.value(h));
  const auto nn = make_nnloss(4, a);
  const BitVec z{1, 0, 1, 1};
  EXPECT_EQ(nn->eval(z), nn->eval(z));
}

TEST(NNLoss, VertexConsistency) {
  Rng rng(6);
  const auto nn = make_nnloss(6, rng);
  for (std::uint64_t h = 0; h < 64; ++h) {
    const BitVec z = vertex_decode(h, 6);
    EXPECT_EQ(nn->eval_smooth(z.as_reals()), nn->eval(z));
  }
}

TEST(NNLoss, GradientMatchesFiniteDifferences) {
  Rng rng(7);
  for (std::size_t d : {4u, 10u}) {
    const auto nn = make_nnloss(d, rng);
    std::vector<std::size_t> coords(d);
    std::iota(coords.begin(), coords.end(), 0);
    for (int k = 0; k < 20; ++k) {
      std::vector<double> u(d);
      for (double& v : u) v = 0.05 + 0.9 * rng.uniform();
      std::vector<double> g(d);
      nn->grad_smooth(u, g);
      const auto fd = oracle::central_differences(
          [&](std::span<const double> x) { return nn->eval_smooth(x); }, u, 1e-6, coords);
      for (std::size_t i = 0; i < d; ++i) EXPECT_LT(oracle::relative_error(g[i], fd[i], 1e-6), 1e-4);
    }
  }
}

TEST(NNLoss, HasVariedValues) {
  Rng rng(8);
  const TabularPB t = TabularPB::tabulate(*make_nnloss(8, rng));
  EXPECT_LT(t.min_value(), t.max_value());
}

TEST(Counterexamples, Ex31Shape) {
  const auto f = make_counterexample(Counterexample::Ex31);
  EXPECT_LT(f->eval(BitVec{0}), f->eval(BitVec{1}));
  EXPECT_EQ(f->eval(BitVec{0}), 0.0);
  EXPECT_NEAR(f->eval(BitVec{1}), 4.505, 1e-12);
  int negative = 0, total = 0;
  for (int k = 1; k < 1000; ++k) {
    const double u = k / 1000.0;
    const double du = f->derivative(u);
    const bool in_sliver = (u >= 0.125 && u < 0.13) || (u >= 0.87 && u < 0.875);
    if (in_sliver) {
      EXPECT_GT(du, 0.0) << u;
    } else {
      EXPECT_LT(du, 0.0) << u;
    }
    negative += du < 0.0;
    ++total;
  }
  EXPECT_GT(negative, 0.9 * total);
  // Piecewise linear and continuous.
  for (double u : {0.125, 0.13, 0.87, 0.875}) {
    EXPECT_NEAR(f->value(u + 1e-12), f->value(u - 1e-12), 1e-8);
  }
  std::vector<double> g(1);
  f->grad_smooth(std::vector<double>{0.5}, g);
  EXPECT_EQ(g[0], -0.5);
}

TEST(Counterexamples, Ex32Shape) {
  const auto f = make_counterexample(Counterexample::Ex32);
  EXPECT_LT(f->eval(BitVec{0}), f->eval(BitVec{1}));
  EXPECT_LT(f->derivative(0.7), 0.0);
  for (int k = 401; k <= 1000; ++k) EXPECT_LT(f->derivative(k / 1000.0), 0.0);
  for (int k = 0; k < 400; ++k) EXPECT_GT(f->derivative(k / 1000.0), 0.0);
  EXPECT_EQ(f->derivative(0.4), 0.0);
  // Derivative matches finite differences everywhere, including the kink.
  for (int k = 1; k < 100; ++k) {
    const double u = k / 100.0, h = 1e-7;
    EXPECT_NEAR(f->derivative(u), (f->value(u + h) - f->value(u - h)) / (2 * h), 1e-6);
  }
}

TEST(GenLoss, TableValues) {
  const double m = -2.0, M0 = 1.0, dM = 0.6;
  const TabularPB f = make_genloss({BitVec{1, 1, 1}, m, M0, dM});
  EXPECT_DOUBLE_EQ(f.eval(BitVec{0, 0, 0}), M0 - dM);
  EXPECT_DOUBLE_EQ(f.eval(BitVec{0, 1, 1}), M0 - dM / 3.0);
  EXPECT_DOUBLE_EQ(f.eval(BitVec{1, 0, 0}), M0 - 2.0 * dM / 3.0);
  EXPECT_DOUBLE_EQ(f.eval(BitVec{1, 1, 1}), m);
  EXPECT_EQ(f.argmin(), 7u);
}

TEST(GenLoss, RejectsNonUniqueMinimum) {
  EXPECT_THROW(make_genloss({BitVec{1, 1, 1}, 0.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(make_genloss({BitVec{1, 1, 1}, 0.5, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(make_genloss({BitVec{1, 1, 1}, -5.0, 1.0, 0.0}), std::invalid_argument);
}

TEST(GenLoss, FormulaOracleAgreesWithBuilder) {
  const BitVec zs{1, 0, 1, 1};
  const TabularPB a = make_genloss({zs, -3.0, 0.5, 1.5});
  const TabularPB b = oracle::genloss_formula(zs, -3.0, 0.5, 1.5);
  for (std::uint64_t h = 0; h < a.size(); ++h) EXPECT_EQ(a.value(h), b.value(h));
}

// The alignment of -grad E[J] with grad p(z*) changes sign exactly at
// m = M0 - dM / (d prod_{j != i} p(z*_j)).
TEST(GenLoss, AlignmentSignFlipsAtThreshold) {
  const BitVec zstar{1, 1, 1};
  const std::vector<double> theta(3, 0.9);
  for (double M0 : {1.0, -0.5}) {
    for (double dM : {1.0, 0.3}) {
      const double thr = genloss_threshold(M0, dM, 3, 0.9);
      EXPECT_NEAR(thr, M0 - dM / 2.43, 1e-12);
      for (double off : {0.01, 0.1, 1.0}) {
        const auto below = oracle::descent_alignment(
            oracle::genloss_formula(zstar, thr - off * dM, M0, dM), zstar, theta);
        const auto above = oracle::descent_alignment(
            oracle::genloss_formula(zstar, thr + off * dM, M0, dM), zstar, theta);
        for (std::size_t i = 0; i < 3; ++i) {
          EXPECT_GT(below[i], 0.0);
          EXPECT_LT(above[i], 0.0);
        }
      }
    }
  }
}

TEST(GenLoss, AlignmentThresholdAtOtherProbabilities) {
  // z* with mixed bits and unequal probabilities; threshold uses prod over j != i.
  const BitVec zstar{1, 0, 1};
  const std::vector<double> theta{0.7, 0.2, 0.6};  // p(z*) per coordinate: 0.7, 0.8, 0.6
  const double pz[3] = {0.7, 0.8, 0.6};
  const double M0 = 1.0, dM = 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < 3; ++j) if (j != i) prod *= pz[j];
    const double thr = M0 - dM / (3.0 * prod);
    const auto lo = oracle::descent_alignment(oracle::genloss_formula(zstar, thr - 0.01, M0, dM), zstar, theta);
    const auto hi = oracle::descent_alignment(oracle::genloss_formula(zstar, thr + 0.01, M0, dM), zstar, theta);
    EXPECT_GT(lo[i], 0.0);
    EXPECT_LT(hi[i], 0.0);
  }
}

// The threshold M0 - dM (1/(1-eps))^(d-1) / d falls without bound once
// (d + 1)(1 - eps) < d, i.e. for d > (1 - eps) / eps.
TEST(GenLoss, ThresholdFallsExponentiallyInDimension) {
  const double eps = 0.1, M0 = 1.0, dM = 1.0;
  const auto thr = [&](std::size_t d) { return genloss_threshold(M0, dM, d, 1.0 - eps); };
  for (std::size_t d = 2; d <= 200; ++d) {
    const double expect = M0 - dM * std::pow(1.0 / (1.0 - eps), static_cast<double>(d - 1)) / static_cast<double>(d);
    EXPECT_NEAR(thr(d), expect, 1e-12 * std::abs(expect));
  }
  for (std::size_t d = 10; d < 200; ++d) EXPECT_LT(thr(d + 1), thr(d)) << d;
  for (std::size_t d = 2; d < 9; ++d) EXPECT_GT(thr(d + 1), thr(d)) << d;
  EXPECT_LT(thr(200), -1e6);
}

TEST(Checkerboard, Examples) {
  const double m = -0.4, M = 2.0;
  const TabularPB f = make_checkerboard(m, M);
  EXPECT_EQ(f.value(0), M);
  EXPECT_EQ(f.value(1), m);
  EXPECT_EQ(f.value(2), m);
  EXPECT_EQ(f.value(3), M);
  const std::vector<double> half{0.5, 0.5};
  const auto g = exact_gradient(f, half);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_DOUBLE_EQ(exact_expectation(f, half), (m + M) / 2.0);
  EXPECT_EQ(f.min_value(), m);
  EXPECT_THROW(make_checkerboard(1.0, 1.0), std::invalid_argument);
}

class MaskedRegressionTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    Rng rng(9);
    mr_ = make_masked_regression(MaskedRegressionSpec{}, rng).release();
  }
  static void TearDownTestSuite() { delete mr_; }
  static MaskedRegression* mr_;
};
MaskedRegression* MaskedRegressionTest::mr_ = nullptr;

TEST_F(MaskedRegressionTest, DimensionIsBackboneWeightCount) {
  EXPECT_EQ(mr_->dim(), 1420u);
  EXPECT_EQ(masked_regression_dim(MaskedRegressionSpec{}), 1420u);
  MaskedRegressionSpec wide;
  wide.backbone_width = 50;
  EXPECT_EQ(masked_regression_dim(wide), 10u * 50 + 3u * 2500 + 50);
}

TEST_F(MaskedRegressionTest, TrainingTargetsSpanUnitInterval) {
  const auto t = mr_->train_targets();
  EXPECT_EQ(*std::min_element(t.begin(), t.end()), 0.0);
  EXPECT_EQ(*std::max_element(t.begin(), t.end()), 1.0);
  EXPECT_EQ(t.size(), 2000u);
  EXPECT_EQ(mr_->valid_targets().size(), 1000u);
}

TEST_F(MaskedRegressionTest, AllOnesMaskIsUnmaskedBackbone) {
  const std::vector<double> ones(mr_->dim(), 1.0);
  const auto plain = mr_->backbone().forward(mr_->train_inputs());
  const auto masked = mr_->backbone().forward(mr_->train_inputs(), ones);
  EXPECT_EQ(plain, masked);
}

TEST_F(MaskedRegressionTest, AllZerosMaskIsFiniteAndDeterministic) {
  const BitVec zero(mr_->dim());
  const double a = mr_->eval(zero), b = mr_->eval(zero);
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_EQ(a, b);
}

TEST_F(MaskedRegressionTest, BatchesPartitionTrainingSet) {
  EXPECT_EQ(mr_->batch_count(), 20u);
  Rng rng(10);
  std::vector<double> u(mr_->dim());
  for (double& v : u) v = rng.uniform();
  double mean = 0.0;
  for (std::size_t b = 0; b < mr_->batch_count(); ++b) mean += mr_->batch(b).eval_smooth(u);
  mean /= static_cast<double>(mr_->batch_count());
  // Batch statistics differ per batch, so only closeness is expected.
  EXPECT_NEAR(mean, mr_->eval_smooth(u), 0.25 * std::abs(mr_->eval_smooth(u)) + 1e-3);
}

TEST_F(MaskedRegressionTest, MaskGradientMatchesFiniteDifferences) {
  Rng rng(11);
  for (int k = 0; k < 3; ++k) {
    std::vector<double> u(mr_->dim());
    for (double& v : u) v = 0.05 + 0.9 * rng.uniform();
    std::vector<double> g(mr_->dim());
    mr_->grad_smooth(u, g);
    std::vector<std::size_t> coords;
    for (int c = 0; c < 10; ++c) coords.push_back(rng.below(mr_->dim()));
    const auto fd = oracle::central_differences(
        [&](std::span<const double> x) { return mr_->eval_smooth(x); }, u, 1e-6, coords);
    for (std::size_t c = 0; c < coords.size(); ++c) {
      EXPECT_LT(oracle::relative_error(g[coords[c]], fd[c], 1e-6), 1e-3) << "coordinate " << coords[c];
    }
  }
}

}  // namespace
}  // namespace pbopt
