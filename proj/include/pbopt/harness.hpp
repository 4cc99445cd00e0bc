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

// Experiment orchestration: configuration, benchmark construction,
// per-seed optimization runs (Monte Carlo, straight-through, continuation),
// CSV trajectories and seed aggregation.

#ifndef PBOPT_HARNESS_HPP
#define PBOPT_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pbopt/benchmarks.hpp"
#include "pbopt/continuation.hpp"
#include "pbopt/core.hpp"
#include "pbopt/csv.hpp"
#include "pbopt/error.hpp"
#include "pbopt/estimators.hpp"
#include "pbopt/optim.hpp"
#include "pbopt/params.hpp"
#include "pbopt/rng.hpp"
#include "pbopt/varlab.hpp"

namespace pbopt {

enum class Method { MonteCarlo, Continuation, StraightThrough };

inline Method parse_method(std::string_view s) {
  if (s == "mc") return Method::MonteCarlo;
  if (s == "cp") return Method::Continuation;
  if (s == "st") return Method::StraightThrough;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

/// Largest dimension for which losses given as networks are tabulated.
inline constexpr std::size_t kTabulateMaxDim = 12;

struct RunConfig {
  std::string bench = "exp-tabular";
  std::size_t d = 10;
  std::uint64_t bench_seed = 0;
  std::string method = "mc";
  std::string estimator = "loorf";
  std::string param = "sigmoid";
  bool true_gradient = false;
  int n = 4;
  double lr = 0.1;
  std::string optimizer = "sgd";
  std::int64_t iters = 1000;
  int seeds = 1;
  std::uint64_t master_seed = 0;
  // "auto": decay for mc, none for cp and st.
  std::string lr_decay = "auto";
  double decay_at = 0.6;
  double decay_factor = 0.5;
  double tau0 = 1.0;
  double tau_final = 1.0 / 200.0;
  std::int64_t steps_per_tau = 100;
  std::int64_t log_every = 1;
  double escort_power = 4.0;
  double direct_clamp = 1e-6;
  double rms_decay = 0.99;
  double rms_eps = 1e-8;
  double gen_m = -2.0;
  double gen_M0 = 1.0;
  double gen_dM = 1.0;
  double cb_m = -1.0;
  double cb_M = 1.0;
  std::size_t mr_width = 20;
  std::size_t mr_train = 2000;
  std::size_t mr_valid = 1000;
  std::size_t mr_batch = 100;
  int valid_masks = 5;
  std::string table_path;
  std::string out;
  int workers = 1;
};

/// key = value pairs (flag names), sorted by key; paths and worker count
/// excluded because they do not change results.
inline std::vector<std::pair<std::string, std::string>> canonical(const RunConfig& c) {
  auto f = [](double v) { return format_double(v); };
  std::vector<std::pair<std::string, std::string>> kv = {
      {"bench", c.bench},
      {"d", std::to_string(c.d)},
      {"bench-seed", std::to_string(c.bench_seed)},
      {"method", c.method},
      {"estimator", c.estimator},
      {"param", c.param},
      {"true-gradient", c.true_gradient ? "true" : "false"},
      {"n", std::to_string(c.n)},
      {"lr", f(c.lr)},
      {"optimizer", c.optimizer},
      {"iters", std::to_string(c.iters)},
      {"seeds", std::to_string(c.seeds)},
      {"master-seed", std::to_string(c.master_seed)},
      {"lr-decay", c.lr_decay},
      {"decay-at", f(c.decay_at)},
      {"decay-factor", f(c.decay_factor)},
      {"tau0", f(c.tau0)},
      {"tau-final", f(c.tau_final)},
      {"steps-per-tau", std::to_string(c.steps_per_tau)},
      {"log-every", std::to_string(c.log_every)},
      {"escort-power", f(c.escort_power)},
      {"direct-clamp", f(c.direct_clamp)},
      {"rms-decay", f(c.rms_decay)},
      {"rms-eps", f(c.rms_eps)},
      {"gen-m", f(c.gen_m)},
      {"gen-M0", f(c.gen_M0)},
      {"gen-dM", f(c.gen_dM)},
      {"cb-m", f(c.cb_m)},
      {"cb-M", f(c.cb_M)},
      {"mr-width", std::to_string(c.mr_width)},
      {"mr-train", std::to_string(c.mr_train)},
      {"mr-valid", std::to_string(c.mr_valid)},
      {"mr-batch", std::to_string(c.mr_batch)},
      {"valid-masks", std::to_string(c.valid_masks)},
  };
  std::sort(kv.begin(), kv.end());
  return kv;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string run_id(const RunConfig& c) {
  std::string text;
  for (const auto& [k, v] : canonical(c)) text += k + "=" + v + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

inline std::string config_text(const RunConfig& c) {
  std::string text;
  for (const auto& [k, v] : canonical(c)) text += k + " = " + v + "\n";
  return text;
}

// ---------------------------------------------------------------------------
// Benchmarks

struct Benchmark {
  std::shared_ptr<const PBFunction> f;
  std::shared_ptr<const TabularPB> table;
  std::shared_ptr<const MaskedRegression> masked;

  std::size_t dim() const { return f->dim(); }
  bool smooth() const { return f->has_smooth(); }

  /// Loss used by update number `step` (0-based).
  const PBFunction& loss_at(std::int64_t step) const {
    if (masked) return batches_.at(static_cast<std::size_t>(step) % batches_.size());
    return table ? static_cast<const PBFunction&>(*table) : *f;
  }
  const PBFunction& smooth_loss_at(std::int64_t step) const {
    if (masked) return batches_.at(static_cast<std::size_t>(step) % batches_.size());
    return *f;
  }
  /// Loss used to rank candidate masks.
  const PBFunction& probe() const { return masked ? *probe_ : loss_at(0); }

  void bind_views() {
    if (!masked) return;
    batches_.clear();
    for (std::size_t b = 0; b < masked->batch_count(); ++b) batches_.push_back(masked->batch(b));
    probe_ = masked->probe();
  }

 private:
  std::vector<RowsView> batches_;
  std::optional<RowsView> probe_;
};

inline MaskedRegressionSpec masked_spec(const RunConfig& c) {
  MaskedRegressionSpec s;
  s.backbone_width = c.mr_width;
  s.train_size = c.mr_train;
  s.valid_size = c.mr_valid;
  s.batch_size = c.mr_batch;
  s.probe_size = std::min<std::size_t>(500, c.mr_train);
  return s;
}

/// Fixes the dimension of benchmarks whose size is implied.
inline void resolve_dimension(RunConfig& c) {
  if (c.bench == "checkerboard") c.d = 2;
  if (c.bench == "ex31" || c.bench == "ex32") c.d = 1;
  if (c.bench == "masked-regression") c.d = masked_regression_dim(masked_spec(c));
}

inline bool is_tabular_bench(const std::string& b) {
  return b == "exp-tabular" || b == "genloss" || b == "checkerboard";
}

inline Benchmark make_benchmark(const RunConfig& c) {
  Benchmark b;
  Rng rng(c.bench_seed);
  if (is_tabular_bench(c.bench) && !c.table_path.empty() && std::filesystem::exists(c.table_path)) {
    auto t = std::make_shared<const TabularPB>(load_table(c.table_path));
    if (t->dim() != c.d) throw std::invalid_argument("persisted table has a different dimension");
    b.table = t;
    b.f = t;
    return b;
  }
  if (c.bench == "exp-tabular") {
    b.table = std::make_shared<const TabularPB>(make_exponential_tabular(c.d, rng));
  } else if (c.bench == "genloss") {
    GenLossSpec s{BitVec(c.d), c.gen_m, c.gen_M0, c.gen_dM};
    for (std::size_t i = 0; i < c.d; ++i) s.zstar.set(i, true);
    b.table = std::make_shared<const TabularPB>(make_genloss(s));
  } else if (c.bench == "checkerboard") {
    b.table = std::make_shared<const TabularPB>(make_checkerboard(c.cb_m, c.cb_M));
  } else if (c.bench == "nnloss") {
    b.f = std::shared_ptr<const PBFunction>(make_nnloss(c.d, rng));
  } else if (c.bench == "ex31") {
    b.f = std::shared_ptr<const PBFunction>(make_counterexample(Counterexample::Ex31));
  } else if (c.bench == "ex32") {
    b.f = std::shared_ptr<const PBFunction>(make_counterexample(Counterexample::Ex32));
  } else if (c.bench == "masked-regression") {
    auto m = std::shared_ptr<const MaskedRegression>(make_masked_regression(masked_spec(c), rng));
    b.masked = m;
    b.f = m;
  } else {
    throw std::invalid_argument("unknown benchmark '" + c.bench + "'");
  }
  if (b.table) {
    b.f = b.table;
    if (!c.table_path.empty()) save_table(c.table_path, *b.table);
  } else if (!b.masked && b.f->dim() <= kTabulateMaxDim) {
    b.table = std::make_shared<const TabularPB>(TabularPB::tabulate(*b.f));
  }
  b.bind_views();
  return b;
}

/// Rejects configurations the chosen benchmark/method cannot run.
inline void validate(const RunConfig& c, const Benchmark& b) {
  const Method m = parse_method(c.method);
  const ParamKind pk = parse_param_kind(c.param);
  const EstimatorKind ek = parse_estimator_kind(c.estimator);
  parse_optimizer_kind(c.optimizer);
  if (c.lr_decay != "auto" && c.lr_decay != "on" && c.lr_decay != "off") {
    throw std::invalid_argument("lr-decay must be auto, on or off");
  }
  if (c.iters < 0) throw parameter_error("iters must be >= 0");
  if (c.seeds < 1) throw parameter_error("seeds must be >= 1");
  if (c.log_every < 1) throw parameter_error("log-every must be >= 1");
  if (c.n < 1) throw parameter_error("n must be >= 1");
  if (c.workers < 1) throw parameter_error("workers must be >= 1");
  if (c.valid_masks < 1) throw parameter_error("valid-masks must be >= 1");
  if (b.dim() != c.d) throw std::invalid_argument("benchmark dimension differs from d");
  if (m == Method::MonteCarlo) {
    if (c.true_gradient) {
      if (!b.table || b.dim() > kBStarMaxDim) {
        throw capability_error("true-gradient mode needs a tabular loss with d <= 10");
      }
    } else {
      if (ek == EstimatorKind::StraightThrough) {
        throw std::invalid_argument("use --method st for straight-through");
      }
      if ((ek == EstimatorKind::Loorf || ek == EstimatorKind::Arms) && c.n < 2) {
        throw parameter_error("LOORF and ARMS need n >= 2");
      }
      if (ek == EstimatorKind::BStar && (!b.table || b.dim() > kBStarMaxDim)) {
        throw capability_error("beta* needs a tabular loss with d <= 10");
      }
    }
  } else {
    if (!b.smooth()) throw capability_error("method '" + c.method + "' needs a smooth loss");
    if (m == Method::StraightThrough && pk != ParamKind::Sigmoid) {
      throw std::invalid_argument("straight-through needs --param sigmoid");
    }
  }
  if (m == Method::Continuation) TemperatureSchedule(c.tau0, c.tau_final, c.steps_per_tau);
}

// ---------------------------------------------------------------------------
// Runs

struct TrajectoryRecord {
  std::string run_id;
  int seed = 0;
  std::int64_t iteration = 0;
  double sampled_loss = std::nan("");
  double exact_loss = std::nan("");
  double discrete_loss = std::nan("");
  double entropy = 0.0;
  double theta_mean = 0.0;
  double valid_loss = std::nan("");
  double elapsed_ms = 0.0;
};

inline const std::vector<std::string>& trajectory_header() {
  static const std::vector<std::string> h = {
      "run_id", "seed", "iteration", "sampled_loss", "exact_loss", "discrete_loss",
      "entropy", "theta_mean", "valid_loss", "elapsed_ms"};
  return h;
}

/// Draws k masks from Ber(theta), returns the one with the lowest probe loss
/// (ties to the earliest draw).
inline BitVec mean_valid_mask(const PBFunction& probe, std::span<const double> theta, int k,
                              Rng& rng) {
  if (k < 1) throw parameter_error("need at least one mask");
  BitVec best(theta.size()), z(theta.size());
  double best_loss = std::numeric_limits<double>::infinity();
  for (int s = 0; s < k; ++s) {
    sample_bernoulli(theta, rng, z);
    const double l = probe.eval(z);
    if (s == 0 || l < best_loss) {
      best_loss = l;
      best = z;
    }
  }
  return best;
}

namespace harness_detail {

inline double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline std::uint64_t validation_stream(int seed) {
  return (std::uint64_t{1} << 32) + static_cast<std::uint64_t>(seed);
}

}  // namespace harness_detail

/// One seed of Monte Carlo or straight-through optimization of r.
inline std::vector<TrajectoryRecord> run_score_method(const RunConfig& c, const Benchmark& b,
                                                      int seed, const std::string& id) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const Method method = parse_method(c.method);
  const Parametrization param(parse_param_kind(c.param), c.escort_power, c.direct_clamp);
  const EstimatorKind ek = parse_estimator_kind(c.estimator);
  Rng rng(c.master_seed, static_cast<std::uint64_t>(seed));
  Rng valid_rng(c.master_seed, harness_detail::validation_stream(seed));
  ParamVec r = param.inverse(Theta::uniform(c.d).probs);
  Optimizer opt(parse_optimizer_kind(c.optimizer), c.lr, c.rms_decay, c.rms_eps);
  const bool decay = c.lr_decay == "on" || (c.lr_decay == "auto" && method == Method::MonteCarlo);
  const auto decay_step = static_cast<std::int64_t>(std::floor(c.decay_at * static_cast<double>(c.iters)));

  std::vector<TrajectoryRecord> out;
  auto log = [&](std::int64_t it, double sampled) {
    const Theta theta = param.forward(r);
    TrajectoryRecord rec;
    rec.run_id = id;
    rec.seed = seed;
    rec.iteration = it;
    rec.sampled_loss = sampled;
    if (b.table) rec.exact_loss = exact_expectation(*b.table, theta);
    rec.entropy = entropy(theta);
    rec.theta_mean = harness_detail::mean_of(theta.probs);
    if (b.masked) {
      const BitVec z = mean_valid_mask(b.probe(), theta, c.valid_masks, valid_rng);
      rec.valid_loss = b.masked->validation_loss(z.as_reals());
    }
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    out.push_back(rec);
  };

  log(0, std::nan(""));
  for (std::int64_t step = 0; step < c.iters; ++step) {
    if (decay && step == decay_step) opt.set_lr(c.lr * c.decay_factor);
    Estimate e;
    if (method == Method::StraightThrough) {
      e = straight_through(b.smooth_loss_at(step), param, r, rng, c.n);
    } else if (c.true_gradient) {
      e.grad = exact_gradient_r(*b.table, param, r);
      e.mean_loss = exact_expectation(*b.table, param.forward(r));
    } else {
      e = estimate(ek, b.loss_at(step), param, r, c.n, rng, b.table.get());
    }
    opt.step(r.values, e.grad);
    param.project(r);
    const std::int64_t it = step + 1;
    if (it % c.log_every == 0 || it == c.iters) log(it, e.mean_loss);
  }
  return out;
}

/// One seed of continuation from x = 0.
inline std::vector<TrajectoryRecord> run_continuation(const RunConfig& c, const Benchmark& b,
                                                      int seed, const std::string& id) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const TemperatureSchedule schedule(c.tau0, c.tau_final, c.steps_per_tau);
  const std::vector<double> taus = schedule.temperatures(c.iters);
  Optimizer opt(parse_optimizer_kind(c.optimizer), c.lr, c.rms_decay, c.rms_eps);
  const bool decay = c.lr_decay == "on";
  const auto decay_step = static_cast<std::int64_t>(std::floor(c.decay_at * static_cast<double>(c.iters)));
  CPState state{std::vector<double>(c.d, 0.0), schedule.tau0()};

  std::vector<TrajectoryRecord> out;
  auto log = [&](std::int64_t it, const PBFunction& loss) {
    std::vector<double> u(c.d);
    const double t = std::max(state.tau, kMinTemperature);
    for (std::size_t i = 0; i < c.d; ++i) u[i] = stable_sigmoid(state.x[i] / t);
    const BitVec z = threshold(state.x);
    TrajectoryRecord rec;
    rec.run_id = id;
    rec.seed = seed;
    rec.iteration = it;
    rec.sampled_loss = loss.eval_smooth(u);
    rec.discrete_loss = b.table ? b.table->eval(z) : loss.eval(z);
    if (b.table) rec.exact_loss = exact_expectation(*b.table, u);
    rec.entropy = entropy(u);
    rec.theta_mean = harness_detail::mean_of(u);
    if (b.masked) rec.valid_loss = b.masked->validation_loss(z.as_reals());
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    out.push_back(rec);
  };

  log(0, b.smooth_loss_at(0));
  for (std::int64_t step = 0; step < c.iters; ++step) {
    if (decay && step == decay_step) opt.set_lr(c.lr * c.decay_factor);
    state.tau = taus[static_cast<std::size_t>(step / schedule.steps_per_tau())];
    const PBFunction& loss = b.smooth_loss_at(step);
    cp_step(loss, state, opt);
    const std::int64_t it = step + 1;
    if (it % c.log_every == 0 || it == c.iters) log(it, loss);
  }
  return out;
}

inline std::vector<TrajectoryRecord> run_seed(const RunConfig& c, const Benchmark& b, int seed,
                                              const std::string& id) {
  return parse_method(c.method) == Method::Continuation ? run_continuation(c, b, seed, id)
                                                        : run_score_method(c, b, seed, id);
}

/// Runs `jobs` tasks on up to `workers` threads; task i writes only slot i.
template <class Task>
void parallel_for(int jobs, int workers, Task&& task) {
  workers = std::max(1, std::min(workers, jobs));
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < jobs; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct RunResult {
  std::string run_id;
  RunConfig config;
  std::vector<std::vector<TrajectoryRecord>> per_seed;
};

/// Builds the benchmark once, validates, then runs every seed.
inline RunResult run_experiment(RunConfig c) {
  resolve_dimension(c);
  const Benchmark b = make_benchmark(c);
  validate(c, b);
  RunResult res;
  res.run_id = run_id(c);
  res.config = c;
  res.per_seed.resize(static_cast<std::size_t>(c.seeds));
  parallel_for(c.seeds, c.workers, [&](int s) {
    res.per_seed[static_cast<std::size_t>(s)] = run_seed(c, b, s, res.run_id);
  });
  return res;
}

// ---------------------------------------------------------------------------
// Output

inline CsvTable trajectory_csv(const std::vector<TrajectoryRecord>& rows) {
  CsvTable t;
  t.header = trajectory_header();
  for (const auto& r : rows) {
    t.rows.push_back({r.run_id, std::to_string(r.seed), std::to_string(r.iteration),
                      format_double(r.sampled_loss), format_double(r.exact_loss),
                      format_double(r.discrete_loss), format_double(r.entropy),
                      format_double(r.theta_mean), format_double(r.valid_loss),
                      format_double(r.elapsed_ms)});
  }
  return t;
}

/// Mean and standard error across seeds for each logged iteration.
inline CsvTable aggregate_csv(const RunResult& res) {
  static const char* cols[] = {"sampled_loss", "exact_loss", "discrete_loss",
                               "entropy", "theta_mean", "valid_loss"};
  auto field = [](const TrajectoryRecord& r, int k) {
    switch (k) {
      case 0: return r.sampled_loss;
      case 1: return r.exact_loss;
      case 2: return r.discrete_loss;
      case 3: return r.entropy;
      case 4: return r.theta_mean;
      default: return r.valid_loss;
    }
  };
  CsvTable t;
  t.header = {"run_id", "iteration", "seeds"};
  for (const char* c : cols) {
    t.header.push_back(std::string(c) + "_mean");
    t.header.push_back(std::string(c) + "_se");
  }
  if (res.per_seed.empty()) return t;
  const std::size_t rows = res.per_seed.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<std::string> line{res.run_id, std::to_string(res.per_seed.front()[i].iteration),
                                  std::to_string(res.per_seed.size())};
    for (int k = 0; k < 6; ++k) {
      double s = 0.0, ss = 0.0;
      std::size_t cnt = 0;
      for (const auto& seed_rows : res.per_seed) {
        const double v = field(seed_rows.at(i), k);
        if (std::isnan(v)) continue;
        s += v;
        ss += v * v;
        ++cnt;
      }
      if (cnt == 0) {
        line.emplace_back();
        line.emplace_back();
        continue;
      }
      const double mean = s / static_cast<double>(cnt);
      double se = std::nan("");
      if (cnt > 1) {
        const double var = std::max(0.0, (ss - static_cast<double>(cnt) * mean * mean) /
                                              static_cast<double>(cnt - 1));
        se = std::sqrt(var / static_cast<double>(cnt));
      }
      line.push_back(format_double(mean));
      line.push_back(format_double(se));
    }
    t.rows.push_back(std::move(line));
  }
  return t;
}

/// Writes <out>/<run_id>/{config.txt, seed_<k>.csv, aggregate.csv}; returns
/// the run directory.
inline std::filesystem::path write_outputs(const RunResult& res, const std::string& out_dir) {
  const std::filesystem::path dir = std::filesystem::path(out_dir) / res.run_id;
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "config.txt", std::ios::binary);
    os << config_text(res.config);
  }
  for (std::size_t s = 0; s < res.per_seed.size(); ++s) {
    write_csv((dir / ("seed_" + std::to_string(s) + ".csv")).string(), trajectory_csv(res.per_seed[s]));
  }
  write_csv((dir / "aggregate.csv").string(), aggregate_csv(res));
  return dir;
}

inline std::filesystem::path optimize(const RunConfig& c) {
  if (c.out.empty()) throw std::invalid_argument("optimize needs an output directory");
  return write_outputs(run_experiment(c), c.out);
}

// ---------------------------------------------------------------------------
// Hyperparameter selection

enum class SelectionRule { AverageFrom, FinalValue };

/// Score of a loss curve indexed by iteration: mean over iterations >= from,
/// or the last value.
inline double selection_score(std::span<const double> curve, SelectionRule rule,
                              std::size_t from = 10) {
  if (curve.empty()) throw std::invalid_argument("empty curve");
  if (rule == SelectionRule::FinalValue) return curve.back();
  if (from >= curve.size()) throw std::invalid_argument("curve shorter than the averaging start");
  return harness_detail::mean_of(curve.subspan(from));
}

/// Index of the curve with the lowest score; ties go to the lowest index.
inline std::size_t select_best(const std::vector<std::vector<double>>& curves, SelectionRule rule,
                               std::size_t from = 10) {
  if (curves.empty()) throw std::invalid_argument("no curves to select from");
  std::size_t best = 0;
  double best_score = selection_score(curves[0], rule, from);
  for (std::size_t k = 1; k < curves.size(); ++k) {
    const double s = selection_score(curves[k], rule, from);
    if (s < best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Variance trajectories as CSV

inline CsvTable variance_csv(const std::vector<VarianceRow>& rows) {
  CsvTable t;
  t.header = {"step", "exact_loss", "entropy", "theta_mean",
              "var_reinforce", "var_loorf", "var_arms", "var_bstar"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.step), format_double(r.exact_loss), format_double(r.entropy),
                      format_double(r.theta_mean), format_double(r.var_sum[0]),
                      format_double(r.var_sum[1]), format_double(r.var_sum[2]),
                      format_double(r.var_sum[3])});
  }
  return t;
}

}  // namespace pbopt

#endif  // PBOPT_HARNESS_HPP
