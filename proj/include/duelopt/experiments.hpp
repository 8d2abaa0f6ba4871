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

#ifndef DUELOPT_EXPERIMENTS_HPP_
#define DUELOPT_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "duelopt/acquisition.hpp"
#include "duelopt/benchmarks.hpp"
#include "duelopt/latent_gp.hpp"
#include "duelopt/oracle.hpp"
#include "duelopt/sampling.hpp"

namespace duelopt {

enum class ExperimentMode { BBO, PBO, BatchPBO };

std::string to_string(ExperimentMode mode);
ExperimentMode parse_experiment_mode(const std::string& name);

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::BBO;
  std::string benchmark = "forrester";
  AcquisitionRule rule = AcquisitionRule::make(RuleKind::UCBPhi);
  int repetitions = 60;
  int iterations = 100;
  int initial_samples = 2;
  int batch_size = 3;
  std::uint64_t base_seed = 0;
  InferenceOptions inference;
  FeatureMapOptions features;
  AcquisitionOptions acquisition;
  /// Samples of the scaled objective used for the hyperparameter fit.
  int fit_samples = 500;
  std::uint64_t fit_seed = kDefaultScaleSeed;
  /// Fixed kernel; fitted (and cached per benchmark) when absent.
  std::optional<KernelConfig> kernel;
  std::string output_dir = ".";

  /// Protocol defaults: BBO 100 iterations x 60 reps, 2 initial; PBO 80 x 40,
  /// 5 initial; batch 30 x 30, m = 3, 5 initial.
  static ExperimentConfig defaults(ExperimentMode mode);
  void validate() const;
  std::uint64_t trial_seed(int repetition) const { return base_seed + static_cast<std::uint64_t>(repetition); }
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

struct TrialRow {
  int iteration = 0;
  std::vector<Vector> query;
  std::vector<int> outcomes;
  Vector x_star;
  double value_at_x_star = 0.0;
  double wall_time = 0.0;  // seconds; excluded from determinism checks
};

struct TrialRecord {
  std::string benchmark;
  std::string rule;
  int repetition = 0;
  std::uint64_t seed = 0;
  std::vector<TrialRow> rows;
  bool aborted = false;
  std::string error;
};

/// One JSON object per row. Wall time is the only non-deterministic field.
void write_trial_jsonl(const TrialRecord& record, std::ostream& out, bool include_wall_time = true);
TrialRecord read_trial_jsonl(const std::string& path);

/// Kernel with maximum-likelihood hyperparameters for a benchmark, fitted on
/// `samples` uniform points of the scaled objective; memoized per process.
KernelConfig fitted_kernel(const BenchmarkSpec& spec, int samples, std::uint64_t seed);

/// Builds the feedback source for one trial.
using OracleFactory =
    std::function<std::unique_ptr<Oracle>(const ExperimentConfig& cfg, int repetition, RandomStream rng)>;

/// Simulated binary or preference oracle, by mode.
OracleFactory simulated_oracle_factory();

/// Runs one seeded trial. Inference and oracle failures abort the trial and
/// are reported in the record with the rows completed so far.
TrialRecord run_trial(const ExperimentConfig& cfg, int repetition,
                      const OracleFactory& oracle = simulated_oracle_factory());

struct CampaignOptions {
  /// 0: DUELOPT_THREADS, else hardware concurrency.
  int threads = 0;
  /// Skip (benchmark, rule, rep) triples with a complete file on disk.
  bool resume = true;
  /// Write results and manifest under each config's output_dir.
  bool write_files = true;
  OracleFactory oracle = simulated_oracle_factory();
  /// Called from the writer thread after each trial finishes.
  std::function<void(const TrialRecord&, bool skipped)> on_trial;
};

struct CampaignResult {
  std::vector<TrialRecord> records;  // in (config, repetition) order
  std::vector<std::string> failures;
  int skipped = 0;
};

/// Threads used by run_campaign for the given request.
int campaign_threads(int requested);

/// `<out>/<benchmark>/<rule>/rep<k>.jsonl`
std::string trial_path(const ExperimentConfig& cfg, int repetition);

CampaignResult run_campaign(const std::vector<ExperimentConfig>& configs,
                            const CampaignOptions& options = {});

/// Manifest: resolved configs (kernels included) and seeds.
std::string manifest_json(const std::vector<ExperimentConfig>& configs);
void write_manifest(const std::string& path, const std::vector<ExperimentConfig>& configs);
std::vector<ExperimentConfig> read_manifest(const std::string& path);

/// Fills in fitted kernels so the configs are fully resolved.
std::vector<ExperimentConfig> resolve_kernels(std::vector<ExperimentConfig> configs);

}  // namespace duelopt

#endif  // DUELOPT_EXPERIMENTS_HPP_
