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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pbopt/pbopt.hpp"

namespace pbopt {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pbopt_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

/// CSV text with the elapsed_ms column blanked.
std::string without_elapsed(const fs::path& p) {
  CsvTable t = read_csv(p.string());
  const std::size_t e = t.column("elapsed_ms");
  for (auto& row : t.rows) row[e].clear();
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + PBOPT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

TEST(TrueGradient, CheckerboardSaddleDoesNotMove) {
  RunConfig c;
  c.bench = "checkerboard";
  c.true_gradient = true;
  c.iters = 1000;
  const RunResult res = run_experiment(c);
  for (const auto& row : res.per_seed[0]) {
    EXPECT_EQ(row.theta_mean, 0.5);
    EXPECT_NEAR(row.entropy, 2 * std::log(2.0), 1e-12);
  }
}

TEST(TrueGradient, MatchesLargeSampleReinforceDirection) {
  Rng rng(1);
  const TabularPB f = make_exponential_tabular(4, rng);
  const Parametrization sig(ParamKind::Sigmoid);
  const ParamVec r = sig.inverse(Theta::uniform(4).probs);
  const GradEstimate g = exact_gradient_r(f, sig, r);
  const Estimate e = reinforce(f, sig, r, 1'000'000, rng);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    dot += g[i] * e.grad[i];
    na += g[i] * g[i];
    nb += e.grad[i] * e.grad[i];
  }
  const double angle = std::acos(std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0)) * 180.0 / std::numbers::pi;
  EXPECT_LT(angle, 2.0);
}

TEST(TrueGradient, GenLossBelowThresholdConvergesToMinimizer) {
  RunConfig c;
  c.bench = "genloss";
  c.d = 3;
  c.gen_m = -2.0;
  c.true_gradient = true;
  c.lr = 1.0;
  c.iters = 5000;
  c.lr_decay = "off";
  const RunResult res = run_experiment(c);
  EXPECT_GT(res.per_seed[0].back().theta_mean, 0.99);
  // Every coordinate, not just the mean.
  RunConfig one = c;
  resolve_dimension(one);
  const Benchmark b = make_benchmark(one);
  const Parametrization sig(ParamKind::Sigmoid);
  ParamVec r = sig.inverse(Theta::uniform(3).probs);
  for (int s = 0; s < 5000; ++s) {
    const GradEstimate g = exact_gradient_r(*b.table, sig, r);
    for (std::size_t i = 0; i < 3; ++i) r.values[i] -= c.lr * g[i];
  }
  for (double t : sig.forward(r).probs) EXPECT_GT(t, 0.99);
}

TEST(TrueGradient, GenLossAboveThresholdMovesAway) {
  const BitVec zstar{1, 1, 1};
  const double M0 = 1.0, dM = 1.0;
  const double m = genloss_threshold(M0, dM, 3, 0.9) + 0.01 * dM;
  const TabularPB f = oracle::genloss_formula(zstar, m, M0, dM);
  const Parametrization sig(ParamKind::Sigmoid);
  ParamVec r = sig.inverse(Theta::uniform(3, 0.9).probs);
  std::vector<double> prev(3, 0.9);
  for (int s = 0; s < 50; ++s) {
    const GradEstimate g = exact_gradient_r(f, sig, r);
    for (std::size_t i = 0; i < 3; ++i) r.values[i] -= 0.1 * g[i];
    const Theta th = sig.forward(r);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_LT(th[i], prev[i]);
      prev[i] = th[i];
    }
  }
}

TEST(TrueGradient, RequiresSmallTable) {
  RunConfig c;
  c.bench = "exp-tabular";
  c.d = 11;
  c.true_gradient = true;
  c.iters = 1;
  EXPECT_THROW(run_experiment(c), capability_error);
  c.bench = "masked-regression";
  c.mr_width = 2;
  EXPECT_THROW(run_experiment(c), capability_error);
}

TEST(Harness, ZeroIterationsLogsInitialStateOnly) {
  for (const char* method : {"mc", "cp"}) {
    RunConfig c;
    c.d = 4;
    c.bench = method == std::string("cp") ? "nnloss" : "exp-tabular";
    c.method = method;
    c.iters = 0;
    const RunResult res = run_experiment(c);
    ASSERT_EQ(res.per_seed[0].size(), 1u);
    EXPECT_EQ(res.per_seed[0][0].iteration, 0);
    EXPECT_NEAR(res.per_seed[0][0].entropy, 4 * std::log(2.0), 1e-12);
  }
}

TEST(Harness, IterationsIncreaseAndEndAtBudget) {
  RunConfig c;
  c.d = 4;
  c.iters = 23;
  c.log_every = 5;
  c.seeds = 3;
  const RunResult res = run_experiment(c);
  ASSERT_EQ(res.per_seed.size(), 3u);
  for (const auto& rows : res.per_seed) {
    std::vector<std::int64_t> its;
    for (const auto& r : rows) its.push_back(r.iteration);
    EXPECT_EQ(its, (std::vector<std::int64_t>{0, 5, 10, 15, 20, 23}));
  }
}

TEST(Harness, SeedsDifferButRerunsMatch) {
  RunConfig c;
  c.d = 6;
  c.iters = 50;
  c.seeds = 2;
  c.workers = 2;
  const RunResult a = run_experiment(c), b = run_experiment(c);
  EXPECT_NE(a.per_seed[0].back().exact_loss, a.per_seed[1].back().exact_loss);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t k = 0; k < a.per_seed[s].size(); ++k) {
      EXPECT_EQ(a.per_seed[s][k].exact_loss, b.per_seed[s][k].exact_loss);
      EXPECT_EQ(format_double(a.per_seed[s][k].sampled_loss), format_double(b.per_seed[s][k].sampled_loss));
    }
  }
}

TEST(Harness, RejectsUnsupportedConfigurations) {
  auto run = [](RunConfig c) {
    c.iters = 1;
    return run_experiment(c);
  };
  RunConfig c;
  c.d = 11;
  c.estimator = "bstar";
  EXPECT_THROW(run(c), capability_error);
  c = RunConfig{};
  c.d = 4;
  c.method = "st";
  EXPECT_THROW(run(c), capability_error);
  c = RunConfig{};
  c.d = 4;
  c.estimator = "st";
  EXPECT_THROW(run(c), std::invalid_argument);
  c = RunConfig{};
  c.bench = "nnloss";
  c.d = 4;
  c.method = "st";
  c.param = "direct";
  EXPECT_THROW(run(c), std::invalid_argument);
  c = RunConfig{};
  c.d = 4;
  c.estimator = "loorf";
  c.n = 1;
  EXPECT_THROW(run(c), parameter_error);
  c = RunConfig{};
  c.bench = "nowhere";
  EXPECT_THROW(run(c), std::invalid_argument);
  c = RunConfig{};
  c.method = "cp";
  c.d = 4;
  EXPECT_THROW(run(c), capability_error);
}

TEST(Harness, RmsPropBeatsSgdOnAverage) {
  auto final_mean = [](const std::string& opt) {
    RunConfig c;
    c.d = 10;
    c.estimator = "loorf";
    c.n = 10;
    c.lr = 0.1;
    c.optimizer = opt;
    c.iters = 1000;
    c.seeds = 20;
    c.log_every = 1000;
    c.workers = 4;
    const RunResult res = run_experiment(c);
    double s = 0.0;
    for (const auto& rows : res.per_seed) s += rows.back().exact_loss;
    return s / 20.0;
  };
  const double rms = final_mean("rmsprop"), sgd = final_mean("sgd");
  RecordProperty("rmsprop_final", std::to_string(rms));
  RecordProperty("sgd_final", std::to_string(sgd));
  EXPECT_LT(rms, sgd);
}

TEST(Harness, ContinuationAndStraightThroughRun) {
  RunConfig c;
  c.bench = "nnloss";
  c.d = 5;
  c.iters = 30;
  c.method = "cp";
  c.steps_per_tau = 10;
  auto res = run_experiment(c);
  EXPECT_EQ(res.per_seed[0].size(), 31u);
  for (const auto& r : res.per_seed[0]) EXPECT_TRUE(std::isfinite(r.discrete_loss));
  c.method = "st";
  res = run_experiment(c);
  EXPECT_EQ(res.per_seed[0].size(), 31u);
  for (const auto& r : res.per_seed[0]) EXPECT_TRUE(std::isnan(r.discrete_loss));
}

TEST(Harness, MaskedRegressionLogsValidationLoss) {
  RunConfig c;
  c.bench = "masked-regression";
  c.mr_width = 4;
  c.mr_train = 200;
  c.mr_valid = 50;
  c.mr_batch = 50;
  c.iters = 8;
  c.estimator = "reinforce";
  const RunResult res = run_experiment(c);
  EXPECT_EQ(res.config.d, masked_regression_dim(masked_spec(c)));
  for (const auto& r : res.per_seed[0]) {
    EXPECT_TRUE(std::isfinite(r.valid_loss));
    EXPECT_TRUE(std::isnan(r.exact_loss));
  }
}

TEST(Selection, AverageRuleDisagreesWithFinalValue) {
  // Curve 0 is low throughout but ends with a spike; curve 1 is high but
  // ends lowest.
  std::vector<double> a(50, 0.2), b(50, 0.8);
  a.back() = 0.9;
  b.back() = 0.1;
  const std::vector<std::vector<double>> curves{a, b};
  EXPECT_EQ(select_best(curves, SelectionRule::AverageFrom), 0u);
  EXPECT_EQ(select_best(curves, SelectionRule::FinalValue), 1u);
  // Values before iteration 10 are ignored.
  std::vector<double> c(50, 0.3);
  for (int k = 0; k < 10; ++k) c[k] = -100.0;
  EXPECT_DOUBLE_EQ(selection_score(c, SelectionRule::AverageFrom), 0.3);
  EXPECT_EQ(select_best({a, a}, SelectionRule::AverageFrom), 0u);
  EXPECT_THROW(selection_score(std::vector<double>(5, 1.0), SelectionRule::AverageFrom), std::invalid_argument);
  EXPECT_THROW(select_best({}, SelectionRule::FinalValue), std::invalid_argument);
}

TEST(MeanValidMask, SingleDrawIsReturned) {
  Rng rng(2);
  const TabularPB f = make_exponential_tabular(5, rng);
  const std::vector<double> theta{0.2, 0.5, 0.7, 0.9, 0.4};
  Rng a(3, 7), b(3, 7);
  const BitVec z = mean_valid_mask(f, theta, 1, a);
  BitVec drawn(5);
  sample_bernoulli(theta, b, drawn);
  EXPECT_EQ(z, drawn);
  EXPECT_THROW(mean_valid_mask(f, theta, 0, a), parameter_error);
}

TEST(MeanValidMask, DeterministicAndMinimal) {
  Rng rng(4);
  const TabularPB f = make_exponential_tabular(6, rng);
  const std::vector<double> theta(6, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    Rng a(5, trial), b(5, trial), c(5, trial);
    const BitVec za = mean_valid_mask(f, theta, 5, a);
    EXPECT_EQ(za, mean_valid_mask(f, theta, 5, b));
    BitVec z(6);
    for (int k = 0; k < 5; ++k) {
      sample_bernoulli(theta, c, z);
      EXPECT_LE(f.eval(za), f.eval(z));
    }
  }
}

TEST(Csv, RoundTripsDoublesAndMissingValues) {
  CsvTable t;
  t.header = {"a", "b"};
  const double x = 0.1 + 0.2, y = -1.0 / 3.0;
  t.rows.push_back({format_double(x), format_double(std::nan(""))});
  t.rows.push_back({format_double(y), format_double(1e-300)});
  std::ostringstream os;
  write_csv(os, t);
  std::istringstream is(os.str());
  const CsvTable u = parse_csv(is);
  EXPECT_EQ(u.header, t.header);
  EXPECT_EQ(parse_field(u.rows[0][0]), x);
  EXPECT_TRUE(std::isnan(parse_field(u.rows[0][1])));
  EXPECT_EQ(u.rows[0][1], "");
  EXPECT_EQ(parse_field(u.rows[1][0]), y);
  EXPECT_EQ(parse_field(u.rows[1][1]), 1e-300);
  EXPECT_THROW(u.column("c"), std::invalid_argument);
}

TEST(RunId, IgnoresOutputPathAndWorkers) {
  RunConfig a, b;
  b.out = "/elsewhere";
  b.workers = 8;
  b.table_path = "/tmp/t.tbl";
  EXPECT_EQ(run_id(a), run_id(b));
  b.lr = 0.2;
  EXPECT_NE(run_id(a), run_id(b));
  EXPECT_EQ(run_id(a).size(), 16u);
}

TEST(Outputs, FilesAndAggregate) {
  const fs::path dir = scratch("outputs");
  RunConfig c;
  c.d = 4;
  c.iters = 10;
  c.seeds = 3;
  c.out = dir.string();
  const fs::path run = optimize(c);
  EXPECT_TRUE(fs::exists(run / "config.txt"));
  for (int s = 0; s < 3; ++s) EXPECT_TRUE(fs::exists(run / ("seed_" + std::to_string(s) + ".csv")));
  const CsvTable seed0 = read_csv((run / "seed_0.csv").string());
  EXPECT_EQ(seed0.header, trajectory_header());
  EXPECT_EQ(seed0.rows.size(), 11u);
  const CsvTable agg = read_csv((run / "aggregate.csv").string());
  EXPECT_EQ(agg.rows.size(), 11u);
  const std::size_t col = agg.column("exact_loss_mean");
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const CsvTable t = read_csv((run / ("seed_" + std::to_string(k) + ".csv")).string());
    s += parse_field(t.rows.back()[t.column("exact_loss")]);
  }
  EXPECT_NEAR(parse_field(agg.rows.back()[col]), s / 3.0, 1e-12);
  fs::remove_all(dir);
}

TEST(Svg, EmptyBodyGivesAxesOnly) {
  CsvTable t;
  t.header = {"run_id", "seed", "iteration", "loss"};
  const std::string svg = render_svg(series_from_csv(t, {"loss"}));
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("<line"), std::string::npos);
  EXPECT_EQ(svg.find("<polyline"), std::string::npos);
}

TEST(Svg, OnePolylinePerRun) {
  CsvTable t;
  t.header = {"run_id", "seed", "iteration", "loss"};
  for (int run = 0; run < 2; ++run)
    for (int k = 0; k < 100; ++k)
      t.rows.push_back({"r" + std::to_string(run), "0", std::to_string(k), format_double(std::sin(k + run))});
  const std::string svg = render_svg(series_from_csv(t, {"loss"}));
  std::size_t count = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++count;
  EXPECT_EQ(count, 2u);
  EXPECT_EQ(svg, render_svg(series_from_csv(t, {"loss"})));
  EXPECT_THROW(
      {
        try {
          series_from_csv(t, {"nope"});
        } catch (const std::invalid_argument& e) {
          EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
          throw;
        }
      },
      std::invalid_argument);
}

TEST(Svg, EmitIsByteDeterministic) {
  const fs::path dir = scratch("svg");
  CsvTable t;
  t.header = {"iteration", "a", "b"};
  for (int k = 0; k < 30; ++k) t.rows.push_back({std::to_string(k), format_double(k * 0.5), format_double(-k)});
  write_csv((dir / "in.csv").string(), t);
  emit_svg((dir / "in.csv").string(), {"a", "b"}, (dir / "1.svg").string());
  emit_svg((dir / "in.csv").string(), {"a", "b"}, (dir / "2.svg").string());
  EXPECT_EQ(slurp(dir / "1.svg"), slurp(dir / "2.svg"));
  fs::remove_all(dir);
}

TEST(Cli, RepeatedRunsProduceIdenticalCsv) {
  const fs::path a = scratch("cli_a"), b = scratch("cli_b");
  const std::string args = "optimize --bench nnloss --d 6 --estimator arms --n 4 --iters 40 --seeds 2 --master-seed 9";
  ASSERT_EQ(run_cli(args + " --out " + a.string()), 0);
  ASSERT_EQ(run_cli(args + " --workers 2 --out " + b.string()), 0);
  std::vector<fs::path> runs;
  for (const auto& e : fs::directory_iterator(a)) runs.push_back(e.path().filename());
  ASSERT_EQ(runs.size(), 1u);
  for (const char* f : {"seed_0.csv", "seed_1.csv"}) {
    EXPECT_EQ(without_elapsed(a / runs[0] / f), without_elapsed(b / runs[0] / f)) << f;
  }
  EXPECT_EQ(slurp(a / runs[0] / "config.txt"), slurp(b / runs[0] / "config.txt"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, ConfigFileMatchesFlags) {
  const fs::path dir = scratch("cli_cfg");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "bench = exp-tabular\nd = 5\nestimator = loorf\nn = 3\niters = 12\nlr = 0.25\n";
  }
  ASSERT_EQ(run_cli("optimize --config " + (dir / "run.cfg").string() + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_cli("optimize --bench exp-tabular --d 5 --estimator loorf --n 3 --iters 12 --lr 0.25 --out " +
                    (dir / "b").string()),
            0);
  std::vector<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(dir / "a")) na.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(dir / "b")) nb.push_back(e.path().filename().string());
  EXPECT_EQ(na, nb);
  EXPECT_NE(run_cli("optimize --bench exp-tabular --d 5 --iters 1"), 0);
  EXPECT_NE(run_cli("optimize --bench nope --iters 1 --out " + (dir / "c").string()), 0);
  fs::remove_all(dir);
}

TEST(Cli, PlotAndVariance) {
  const fs::path dir = scratch("cli_plot");
  ASSERT_EQ(run_cli("variance --bench exp-tabular --d 2 --steps 20 --out " + (dir / "v.csv").string()), 0);
  const CsvTable v = read_csv((dir / "v.csv").string());
  EXPECT_EQ(v.rows.size(), 21u);
  ASSERT_EQ(run_cli("plot --in " + (dir / "v.csv").string() + " --cols var_loorf,var_arms --out " +
                    (dir / "v.svg").string()),
            0);
  EXPECT_NE(slurp(dir / "v.svg").find("<polyline"), std::string::npos);
  EXPECT_NE(run_cli("plot --in " + (dir / "v.csv").string() + " --cols missing --out " + (dir / "w.svg").string()), 0);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace pbopt
