// Copyright 2026 The duelopt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

// duelopt command-line tool. Links only the C interface of libduelopt.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "duelopt/duelopt.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Owns a string returned by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { duelopt_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

void check(duelopt_status st, bool usage = false) {
  if (st == DUELOPT_OK) return;
  const std::string msg = duelopt_last_error();
  if (usage || st == DUELOPT_ERR_INVALID_ARGUMENT) throw UsageError(msg);
  throw RuntimeError(msg);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError(flag + ": expected LO,HI, got '" + text + "'");
  try {
    std::size_t used = 0;
    const double lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("trailing");
    const double hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("trailing");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw std::invalid_argument("order");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError(flag + ": malformed range '" + text + "'");
  }
}

std::vector<double> linspace(double lo, double hi, int steps) {
  std::vector<double> v(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    v[static_cast<std::size_t>(i)] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  }
  return v;
}

std::string fmt(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// --- run --------------------------------------------------------------------------

struct RunArgs {
  std::string mode;
  std::string benchmarks;
  std::string rules;
  int reps = 0;
  int iters = 0;
  int init = -1;
  int batch_size = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string oracle = "simulated";
  std::string out = ".";
  int threads = 0;
  std::string inference;
  int fit_samples = 0;
  bool no_resume = false;
  std::string manifest;
};

void on_trial(const duelopt_trial_event* ev, void*) {
  std::ostringstream line;
  line << '[' << ev->completed << '/' << ev->total << "] " << ev->benchmark << ' ' << ev->rule
       << " rep" << ev->repetition << " seed=" << ev->seed;
  if (ev->skipped) {
    line << " skipped (complete on disk)";
  } else if (ev->aborted) {
    line << " ABORTED: " << ev->error;
  } else {
    line << " final=" << fmt(ev->final_value, 6);
  }
  std::cerr << line.str() << std::endl;
}

int cmd_run(const RunArgs& a, bool reps_set, bool iters_set) {
  const bool interactive = a.oracle == "interactive";
  if (a.oracle != "simulated" && !interactive) {
    throw UsageError("--oracle must be simulated or interactive");
  }
  json configs = json::array();
  if (!a.manifest.empty()) {
    LibString s;
    check(duelopt_manifest_read(a.manifest.c_str(), &s.p));
    configs = json::parse(s.str());
  } else {
    if (a.mode.empty()) throw UsageError("run: --mode is required");
    if (a.rules.empty()) throw UsageError("run: --rules is required");
    std::vector<std::string> benches = split(a.benchmarks, ',');
    if (benches.empty()) {
      if (!interactive) throw UsageError("run: --benchmarks is required");
      benches.push_back("forrester");
    }
    const std::vector<std::string> rules = split(a.rules, ',');
    for (const auto& r : rules) {
      LibString canon;
      check(duelopt_rule_canonical(r.c_str(), &canon.p), true);
    }
    for (const auto& b : benches) {
      std::size_t d = 0;
      check(duelopt_benchmark_dim(b.c_str(), &d), true);
    }
    json over = json::object();
    over["output_dir"] = a.out;
    if (reps_set) over["repetitions"] = a.reps;
    else if (interactive) over["repetitions"] = 1;
    if (iters_set) over["iterations"] = a.iters;
    if (a.init >= 0) over["initial_samples"] = a.init;
    else if (interactive) over["initial_samples"] = 0;
    if (a.batch_size > 0) over["batch_size"] = a.batch_size;
    if (a.seed_set) over["base_seed"] = a.seed;
    if (!a.inference.empty()) over["inference"] = {{"method", a.inference}};
    if (a.fit_samples > 0) over["fit_samples"] = a.fit_samples;
    const std::string over_s = over.dump();
    for (const auto& b : benches) {
      for (const auto& r : rules) {
        LibString cfg;
        check(duelopt_config_create(a.mode.c_str(), b.c_str(), r.c_str(), over_s.c_str(), &cfg.p),
              true);
        configs.push_back(json::parse(cfg.str()));
      }
    }
  }
  duelopt_campaign_options opts;
  duelopt_campaign_options_init(&opts);
  opts.threads = a.threads;
  opts.resume = a.no_resume ? 0 : 1;
  opts.interactive = interactive ? 1 : 0;
  std::size_t failures = 0;
  const std::string payload = configs.dump();
  check(duelopt_run_campaign(payload.c_str(), &opts, on_trial, nullptr, &failures));
  if (failures > 0) {
    std::cerr << "run: " << failures << " trial(s) failed" << std::endl;
    return kExitRuntime;
  }
  return kExitOk;
}

// --- analyze ----------------------------------------------------------------------

int cmd_analyze(const std::string& input, double alpha, const std::string& out, bool as_json) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw UsageError("--alpha must be in (0, 0.5)");
  LibString table, report;
  const duelopt_status st = duelopt_analyze(input.c_str(), alpha, out.c_str(), &table.p, &report.p);
  if (st != DUELOPT_OK) throw RuntimeError(duelopt_last_error());
  std::cout << (as_json ? report.str() : table.str());
  std::cerr << "analyze: report written to " << out << std::endl;
  return kExitOk;
}

// --- list-benchmarks --------------------------------------------------------------

int cmd_list(bool as_json, const std::string& out) {
  if (as_json || !out.empty()) {
    LibString s;
    check(duelopt_benchmark_sidecar(&s.p));
    if (!out.empty()) {
      namespace fs = std::filesystem;
      fs::create_directories(out);
      const std::string path = (fs::path(out) / "benchmarks.json").string();
      std::ofstream f(path);
      if (!(f << s.str())) throw RuntimeError("cannot write '" + path + "'");
      std::cerr << "list-benchmarks: wrote " << path << std::endl;
    }
    if (as_json) {
      std::cout << s.str();
      return kExitOk;
    }
  }
  std::cout << "name,dim,kernel,box\n";
  for (std::size_t i = 0; i < duelopt_benchmark_count(); ++i) {
    const char* name = nullptr;
    check(duelopt_benchmark_name(i, &name));
    std::size_t d = 0;
    check(duelopt_benchmark_dim(name, &d));
    std::vector<double> lo(d), hi(d);
    const char* family = nullptr;
    check(duelopt_benchmark_box(name, lo.data(), hi.data(), &family));
    std::ostringstream box;
    for (std::size_t k = 0; k < d; ++k) {
      box << (k ? " x " : "") << '[' << fmt(lo[k], 6) << ' ' << fmt(hi[k], 6) << ']';
    }
    std::cout << name << ',' << d << ',' << family << ',' << box.str() << '\n';
  }
  return kExitOk;
}

// --- decompose --------------------------------------------------------------------

int cmd_decompose(const std::string& mu_range, const std::string& s2_range, int steps) {
  if (steps < 1) throw UsageError("--steps must be >= 1");
  const auto [mlo, mhi] = parse_range(mu_range, "--mu-range");
  const auto [slo, shi] = parse_range(s2_range, "--sigma2-range");
  if (slo < 0.0) throw UsageError("--sigma2-range: variances must be >= 0");
  std::cout << "mu,sigma2,total,epistemic_var,aleatoric_var,bald_info,conditional_entropy_term\n";
  for (double mu : linspace(mlo, mhi, steps)) {
    for (double s2 : linspace(slo, shi, steps)) {
      double total = 0, epi = 0, alea = 0, info = 0, cond = 0;
      check(duelopt_decompose(mu, s2, &total, &epi, &alea));
      check(duelopt_bald(mu, s2, &info, &cond));
      std::cout << fmt(mu) << ',' << fmt(s2) << ',' << fmt(total) << ',' << fmt(epi) << ','
                << fmt(alea) << ',' << fmt(info) << ',' << fmt(cond) << '\n';
    }
  }
  return kExitOk;
}

// --- sample-posterior -------------------------------------------------------------

int cmd_sample(const std::string& dataset, const std::string& method, int n_samples, int grid,
               std::uint64_t seed, int features, const std::string& inference) {
  if (n_samples < 1) throw UsageError("--n-samples must be >= 1");
  if (grid < 1) throw UsageError("--grid must be >= 1");
  if (method != "decoupled" && method != "weight-space") {
    throw UsageError("--method must be decoupled or weight-space");
  }
  duelopt_dataset* ds = nullptr;
  check(duelopt_dataset_load(dataset.c_str(), &ds), false);
  std::unique_ptr<duelopt_dataset, void (*)(duelopt_dataset*)> ds_guard(ds, duelopt_dataset_free);
  duelopt_posterior* post = nullptr;
  {
    const duelopt_status st = duelopt_posterior_fit(ds, inference.c_str(), &post);
    if (st != DUELOPT_OK) throw RuntimeError(duelopt_last_error());
  }
  std::unique_ptr<duelopt_posterior, void (*)(duelopt_posterior*)> post_guard(post,
                                                                             duelopt_posterior_free);
  const std::size_t d = duelopt_dataset_dim(ds);
  std::vector<double> lo(d), hi(d);
  check(duelopt_dataset_box(ds, lo.data(), hi.data()));

  std::size_t n_points = 1;
  for (std::size_t k = 0; k < d; ++k) n_points *= static_cast<std::size_t>(grid);
  std::vector<double> points(d * n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    std::size_t rest = i;
    for (std::size_t k = d; k-- > 0;) {
      const auto axis = linspace(lo[k], hi[k], grid);
      points[i * d + k] = axis[rest % static_cast<std::size_t>(grid)];
      rest /= static_cast<std::size_t>(grid);
    }
  }
  std::vector<double> values(n_points * static_cast<std::size_t>(n_samples));
  int starvation = 0;
  const duelopt_status st =
      duelopt_sample_posterior(post, method.c_str(), static_cast<std::size_t>(n_samples),
                               points.data(), n_points, features, seed, values.data(), &starvation);
  if (st != DUELOPT_OK) throw RuntimeError(duelopt_last_error());
  if (starvation) {
    std::cerr << "warning: variance starvation: " << duelopt_dataset_size(ds)
              << " observations exceed the feature count; weight-space variance is "
                 "underestimated away from the data"
              << std::endl;
  }

  for (std::size_t k = 0; k < d; ++k) std::cout << 'x' << k << ',';
  std::cout << "empirical_mean,empirical_variance,posterior_mean,posterior_variance";
  for (int s = 0; s < n_samples; ++s) std::cout << ",s" << s;
  std::cout << '\n';
  for (std::size_t i = 0; i < n_points; ++i) {
    double mean = 0.0;
    for (int s = 0; s < n_samples; ++s) mean += values[static_cast<std::size_t>(s) * n_points + i];
    mean /= n_samples;
    double var = 0.0;
    for (int s = 0; s < n_samples; ++s) {
      const double e = values[static_cast<std::size_t>(s) * n_points + i] - mean;
      var += e * e;
    }
    var = n_samples > 1 ? var / (n_samples - 1) : 0.0;
    double pm = 0.0, pv = 0.0;
    check(duelopt_posterior_predict(post, &points[i * d], d, &pm, &pv));
    for (std::size_t k = 0; k < d; ++k) std::cout << fmt(points[i * d + k], 10) << ',';
    std::cout << fmt(mean, 10) << ',' << fmt(var, 10) << ',' << fmt(pm, 10) << ',' << fmt(pv, 10);
    for (int s = 0; s < n_samples; ++s) {
      std::cout << ',' << fmt(values[static_cast<std::size_t>(s) * n_points + i], 10);
    }
    std::cout << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization with binary and preferential feedback"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", std::string(duelopt_version()));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an optimization campaign");
  run_cmd->add_option("--mode", run.mode, "Protocol: bbo, pbo or batch");
  run_cmd->add_option("--benchmarks", run.benchmarks, "Comma-separated benchmark names");
  run_cmd->add_option("--rules", run.rules,
                      "Comma-separated acquisition rules, e.g. ucb-phi:beta=2.326,random");
  auto* reps_opt = run_cmd->add_option("--reps", run.reps, "Repetitions per (benchmark, rule)")
                       ->check(CLI::PositiveNumber);
  auto* iters_opt =
      run_cmd->add_option("--iters", run.iters, "Iterations per trial")->check(CLI::PositiveNumber);
  run_cmd->add_option("--init", run.init, "Initial random queries before acquisition")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--batch-size", run.batch_size, "Batch size m (batch mode)")
      ->check(CLI::Range(2, 64));
  auto* seed_opt = run_cmd->add_option("--seed", run.seed, "Base seed; trial k uses seed + k");
  run_cmd->add_option("--oracle", run.oracle, "simulated or interactive")
      ->check(CLI::IsMember({"simulated", "interactive"}));
  run_cmd->add_option("--out", run.out, "Output directory for results and manifest");
  run_cmd->add_option("--threads", run.threads, "Worker threads (0: DUELOPT_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--inference", run.inference, "Latent inference: ep or laplace")
      ->check(CLI::IsMember({"ep", "laplace"}));
  run_cmd->add_option("--fit-samples", run.fit_samples,
                      "Benchmark evaluations used to fit kernel hyperparameters")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--no-resume", run.no_resume, "Rerun trials already complete on disk");
  run_cmd->add_option("--manifest", run.manifest,
                      "Rerun the configs stored in a manifest.json (other config flags ignored)");

  std::string input, analyze_out = ".";
  double alpha = 5e-4;
  bool analyze_json = false;
  auto* an_cmd = app.add_subcommand("analyze", "Rank acquisition rules from result files");
  an_cmd->add_option("--input", input, "Directory of JSON-lines results")->required();
  an_cmd->add_option("--alpha", alpha, "One-sided Mann-Whitney significance level");
  an_cmd->add_option("--out", analyze_out, "Directory for ranking.json/csv and win matrices");
  an_cmd->add_flag("--json", analyze_json, "Print the full JSON report instead of the table");

  bool list_json = false;
  std::string list_out;
  auto* ls_cmd = app.add_subcommand("list-benchmarks", "List registered benchmark functions");
  ls_cmd->add_flag("--json", list_json, "Print the benchmarks.json sidecar");
  ls_cmd->add_option("--out", list_out, "Also write benchmarks.json into this directory");

  std::string mu_range = "-5,5", s2_range = "0,10";
  int steps = 21;
  auto* dc_cmd =
      app.add_subcommand("decompose", "Uncertainty decomposition over a (mu, sigma2) grid (CSV)");
  dc_cmd->add_option("--mu-range", mu_range, "Latent mean range LO,HI");
  dc_cmd->add_option("--sigma2-range", s2_range, "Latent variance range LO,HI");
  dc_cmd->add_option("--steps", steps, "Grid points per axis");

  std::string dataset, method = "decoupled", inference = "ep";
  int n_samples = 100, grid = 50, features = 0;
  std::uint64_t sample_seed = 0;
  auto* sp_cmd = app.add_subcommand("sample-posterior",
                                    "Draw posterior function samples on a grid (CSV)");
  sp_cmd->add_option("--dataset", dataset, "Observation dataset (JSON lines)")->required();
  sp_cmd->add_option("--method", method, "decoupled or weight-space");
  sp_cmd->add_option("--n-samples", n_samples, "Number of function samples");
  sp_cmd->add_option("--grid", grid, "Grid points per dimension");
  sp_cmd->add_option("--seed", sample_seed, "Random seed");
  sp_cmd->add_option("--features", features, "Features per dimension (0: default)");
  sp_cmd->add_option("--inference", inference, "Latent inference: ep or laplace")
      ->check(CLI::IsMember({"ep", "laplace"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  run.seed_set = seed_opt->count() > 0;
  try {
    if (*run_cmd) return cmd_run(run, reps_opt->count() > 0, iters_opt->count() > 0);
    if (*an_cmd) return cmd_analyze(input, alpha, analyze_out, analyze_json);
    if (*ls_cmd) return cmd_list(list_json, list_out);
    if (*dc_cmd) return cmd_decompose(mu_range, s2_range, steps);
    if (*sp_cmd) {
      return cmd_sample(dataset, method, n_samples, grid, sample_seed, features, inference);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitRuntime;
  }
  return kExitUsage;
}
