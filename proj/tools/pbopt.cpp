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

// pbopt: optimize | variance | plot

#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbopt/pbopt.hpp"

namespace {

// CLI11 reads config files only on the root app, so subcommands load theirs
// here. Keys given on the command line take precedence over the file.
void apply_config(CLI::App& cmd, const std::string& path) {
  if (path.empty()) return;
  std::ifstream is(path);
  if (!is) throw CLI::FileError::Missing(path);
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(is)) {
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == cmd.get_name())) {
      throw CLI::ConfigError("config section '" + item.parents[0] + "' does not match '" +
                             cmd.get_name() + "'");
    }
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") continue;
    CLI::Option* opt = cmd.get_option_no_throw("--" + key);
    if (opt == nullptr) throw CLI::ConfigError("unknown config key '" + item.name + "'");
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void require_out(const std::string& out) {
  if (out.empty()) throw CLI::RequiredError("--out");
}

void add_optimize(CLI::App& app, pbopt::RunConfig& c, std::string& config_path) {
  auto* cmd = app.add_subcommand("optimize", "Optimize a benchmark over several seeds");
  cmd->add_option("--config", config_path, "File of `key = value` lines mirroring the flags");
  cmd->add_option("--bench", c.bench,
                  "exp-tabular|nnloss|checkerboard|genloss|ex31|ex32|masked-regression")
      ->capture_default_str();
  cmd->add_option("--d", c.d, "Dimension (implied for checkerboard, ex31/ex32, masked-regression)")
      ->capture_default_str();
  cmd->add_option("--bench-seed", c.bench_seed, "Seed of the benchmark instance")->capture_default_str();
  cmd->add_option("--table", c.table_path, "Persist/reuse the tabular instance at this path");
  cmd->add_option("--method", c.method, "mc|cp|st")->capture_default_str();
  cmd->add_option("--estimator", c.estimator, "reinforce|loorf|arms|bstar")->capture_default_str();
  cmd->add_flag("--true-gradient", c.true_gradient, "Exact gradient instead of an estimator (tabular)");
  cmd->add_option("--param", c.param, "sigmoid|direct|cosine|escort")->capture_default_str();
  cmd->add_option("--n", c.n, "Samples per gradient estimate")->capture_default_str();
  cmd->add_option("--lr", c.lr, "Learning rate")->capture_default_str();
  cmd->add_option("--optimizer", c.optimizer, "sgd|rmsprop")->capture_default_str();
  cmd->add_option("--iters", c.iters, "Number of updates")->capture_default_str();
  cmd->add_option("--seeds", c.seeds, "Number of seeds")->capture_default_str();
  cmd->add_option("--master-seed", c.master_seed, "Master seed")->capture_default_str();
  cmd->add_option("--lr-decay", c.lr_decay, "auto|on|off (auto: decay for mc only)")->capture_default_str();
  cmd->add_option("--decay-at", c.decay_at, "Fraction of training at which lr decays")->capture_default_str();
  cmd->add_option("--decay-factor", c.decay_factor, "lr multiplier at decay")->capture_default_str();
  cmd->add_option("--tau0", c.tau0, "Initial temperature (cp)")->capture_default_str();
  cmd->add_option("--tau-final", c.tau_final, "Final temperature (cp)")->capture_default_str();
  cmd->add_option("--steps-per-tau", c.steps_per_tau, "Updates per temperature (cp)")->capture_default_str();
  cmd->add_option("--log-every", c.log_every, "Log every k updates")->capture_default_str();
  cmd->add_option("--escort-power", c.escort_power, "Escort exponent")->capture_default_str();
  cmd->add_option("--direct-clamp", c.direct_clamp, "Direct parametrization clamp")->capture_default_str();
  cmd->add_option("--rms-decay", c.rms_decay, "RMSprop decay")->capture_default_str();
  cmd->add_option("--rms-eps", c.rms_eps, "RMSprop epsilon")->capture_default_str();
  cmd->add_option("--gen-m", c.gen_m, "genloss: value at the minimizer")->capture_default_str();
  cmd->add_option("--gen-M0", c.gen_M0, "genloss: M0")->capture_default_str();
  cmd->add_option("--gen-dM", c.gen_dM, "genloss: delta M")->capture_default_str();
  cmd->add_option("--cb-m", c.cb_m, "checkerboard: low value")->capture_default_str();
  cmd->add_option("--cb-M", c.cb_M, "checkerboard: high value")->capture_default_str();
  cmd->add_option("--mr-width", c.mr_width, "masked-regression backbone width")->capture_default_str();
  cmd->add_option("--mr-train", c.mr_train, "masked-regression training rows")->capture_default_str();
  cmd->add_option("--mr-valid", c.mr_valid, "masked-regression validation rows")->capture_default_str();
  cmd->add_option("--mr-batch", c.mr_batch, "masked-regression batch size")->capture_default_str();
  cmd->add_option("--valid-masks", c.valid_masks, "Masks compared for validation")->capture_default_str();
  cmd->add_option("--workers", c.workers, "Concurrent seeds")->capture_default_str();
  cmd->add_option("--out", c.out, "Output directory (required)");
  cmd->callback([cmd, &c, &config_path] {
    apply_config(*cmd, config_path);
    require_out(c.out);
    const auto dir = pbopt::optimize(c);
    std::cout << dir.string() << "\n";
  });
}

struct VarianceArgs {
  std::string bench = "exp-tabular";
  std::size_t d = 4;
  std::uint64_t bench_seed = 0;
  std::uint64_t master_seed = 0;
  pbopt::TrajectoryConfig cfg;
  std::string space = "theta";
  std::string out;
  std::string config_path;
};

void add_variance(CLI::App& app, VarianceArgs& a) {
  auto* cmd = app.add_subcommand("variance", "Estimator variance along an exact-gradient trajectory");
  cmd->add_option("--config", a.config_path, "File of `key = value` lines mirroring the flags");
  cmd->add_option("--bench", a.bench, "exp-tabular|nnloss|genloss|checkerboard")->capture_default_str();
  cmd->add_option("--d", a.d, "Dimension")->capture_default_str();
  cmd->add_option("--bench-seed", a.bench_seed, "Seed of the benchmark instance")->capture_default_str();
  cmd->add_option("--master-seed", a.master_seed, "Seed for Monte Carlo variance")->capture_default_str();
  cmd->add_option("--n", a.cfg.n, "Samples per estimate")->capture_default_str();
  cmd->add_option("--lr", a.cfg.lr, "Step size of the exact-gradient descent")->capture_default_str();
  cmd->add_option("--steps", a.cfg.steps, "Descent steps")->capture_default_str();
  cmd->add_option("--log-every", a.cfg.log_every, "Log every k steps")->capture_default_str();
  cmd->add_option("--space", a.space, "theta|sigmoid: coordinates of the descent")->capture_default_str();
  cmd->add_flag("--exact,!--mc", a.cfg.exact, "Exact enumeration (default) or Monte Carlo");
  cmd->add_option("--mc-reps", a.cfg.mc_reps, "Monte Carlo repetitions per step")->capture_default_str();
  cmd->add_option("--out", a.out, "Output CSV (required)");
  cmd->callback([cmd, &a] {
    apply_config(*cmd, a.config_path);
    require_out(a.out);
    pbopt::RunConfig rc;
    rc.bench = a.bench;
    rc.d = a.d;
    rc.bench_seed = a.bench_seed;
    pbopt::resolve_dimension(rc);
    const pbopt::Benchmark b = pbopt::make_benchmark(rc);
    if (!b.table) throw pbopt::capability_error("variance needs a tabular (or tabulated) loss");
    a.cfg.space = pbopt::parse_trajectory_space(a.space);
    pbopt::Rng rng(a.master_seed);
    const auto rows = pbopt::variance_trajectory(*b.table, a.cfg, &rng);
    pbopt::write_csv(a.out, pbopt::variance_csv(rows));
  });
}

struct PlotArgs {
  std::string in;
  std::vector<std::string> cols;
  std::string out;
};

void add_plot(CLI::App& app, PlotArgs& a) {
  auto* cmd = app.add_subcommand("plot", "SVG line chart of CSV columns");
  cmd->add_option("--in", a.in, "Input CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--cols", a.cols, "Columns to plot")->required()->delimiter(',');
  cmd->add_option("--out", a.out, "Output SVG")->required();
  cmd->callback([&a] { pbopt::emit_svg(a.in, a.cols, a.out); });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-Boolean optimization toolkit"};
  app.require_subcommand(1);
  pbopt::RunConfig run;
  VarianceArgs var;
  PlotArgs plot;
  std::string run_config_path;
  add_optimize(app, run, run_config_path);
  add_variance(app, var);
  add_plot(app, plot);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "pbopt: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
