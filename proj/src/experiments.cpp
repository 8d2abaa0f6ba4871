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

#include "duelopt/experiments.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace duelopt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

RuleFamily family_for(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::BBO: return RuleFamily::Binary;
    case ExperimentMode::PBO: return RuleFamily::Preference;
    case ExperimentMode::BatchPBO: return RuleFamily::Batch;
  }
  return RuleFamily::Binary;
}

}  // namespace

std::string to_string(ExperimentMode mode) {
  switch (mode) {
    case ExperimentMode::BBO: return "bbo";
    case ExperimentMode::PBO: return "pbo";
    case ExperimentMode::BatchPBO: return "batch";
  }
  return "unknown";
}

ExperimentMode parse_experiment_mode(const std::string& name) {
  if (name == "bbo") return ExperimentMode::BBO;
  if (name == "pbo") return ExperimentMode::PBO;
  if (name == "batch" || name == "batch-pbo") return ExperimentMode::BatchPBO;
  throw InvalidArgument("unknown mode '" + name + "' (expected bbo, pbo or batch)");
}

// --- Config ----------------------------------------------------------------------

ExperimentConfig ExperimentConfig::defaults(ExperimentMode mode) {
  ExperimentConfig c;
  c.mode = mode;
  switch (mode) {
    case ExperimentMode::BBO:
      c.rule = AcquisitionRule::make(RuleKind::UCBPhi);
      c.iterations = 100;
      c.repetitions = 60;
      c.initial_samples = 2;
      break;
    case ExperimentMode::PBO:
      c.rule = AcquisitionRule::make(RuleKind::MUC);
      c.iterations = 80;
      c.repetitions = 40;
      c.initial_samples = 5;
      break;
    case ExperimentMode::BatchPBO:
      c.rule = AcquisitionRule::make(RuleKind::BatchMUC);
      c.iterations = 30;
      c.repetitions = 30;
      c.initial_samples = 5;
      c.batch_size = 3;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  require(repetitions >= 1, "config: repetitions must be >= 1");
  require(iterations >= 1, "config: iterations must be >= 1");
  require(initial_samples >= 0, "config: initial_samples must be >= 0");
  require(fit_samples >= 2, "config: fit_samples must be >= 2");
  require(rule.family() == family_for(mode),
          "config: rule '" + rule.name() + "' does not belong to mode " + to_string(mode));
  if (mode == ExperimentMode::BatchPBO) require(batch_size >= 2, "config: batch size must be >= 2");
  const BenchmarkSpec& spec = find_benchmark(benchmark);
  if (kernel) {
    kernel->validate();
    require(kernel->dim() == spec.dim(), "config: kernel dimension does not match benchmark");
  }
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"mode", to_string(c.mode)},
           {"benchmark", c.benchmark},
           {"rule", c.rule.name()},
           {"repetitions", c.repetitions},
           {"iterations", c.iterations},
           {"initial_samples", c.initial_samples},
           {"batch_size", c.batch_size},
           {"base_seed", c.base_seed},
           {"inference",
            {{"method", to_string(c.inference.method)},
             {"ep_damping", c.inference.ep_damping},
             {"ep_tolerance", c.inference.ep_tolerance},
             {"ep_max_sweeps", c.inference.ep_max_sweeps},
             {"laplace_tolerance", c.inference.laplace_tolerance},
             {"laplace_max_iterations", c.inference.laplace_max_iterations}}},
           {"features",
            {{"per_dim_counts", c.features.per_dim_counts},
             {"boundary_factor", c.features.boundary_factor},
             {"max_features", c.features.max_features}}},
           {"acquisition",
            {{"restarts", c.acquisition.restarts},
             {"batch_restarts", c.acquisition.batch_restarts},
             {"pool", c.acquisition.pool}}},
           {"fit_samples", c.fit_samples},
           {"fit_seed", c.fit_seed},
           {"output_dir", c.output_dir}};
  if (c.kernel) j["kernel"] = *c.kernel;
  json seeds = json::array();
  for (int r = 0; r < c.repetitions; ++r) seeds.push_back(c.trial_seed(r));
  j["trial_seeds"] = seeds;
}

void from_json(const json& j, ExperimentConfig& c) {
  c.mode = parse_experiment_mode(j.at("mode").get<std::string>());
  c.benchmark = j.at("benchmark").get<std::string>();
  c.rule = AcquisitionRule::parse(j.at("rule").get<std::string>());
  c.repetitions = j.at("repetitions").get<int>();
  c.iterations = j.at("iterations").get<int>();
  c.initial_samples = j.at("initial_samples").get<int>();
  c.batch_size = j.value("batch_size", 3);
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  if (j.contains("inference")) {
    const json& in = j.at("inference");
    c.inference.method = parse_inference_method(in.value("method", "ep"));
    c.inference.ep_damping = in.value("ep_damping", 0.5);
    c.inference.ep_tolerance = in.value("ep_tolerance", 1e-6);
    c.inference.ep_max_sweeps = in.value("ep_max_sweeps", 200);
    c.inference.laplace_tolerance = in.value("laplace_tolerance", 1e-8);
    c.inference.laplace_max_iterations = in.value("laplace_max_iterations", 100);
  }
  if (j.contains("features")) {
    const json& f = j.at("features");
    c.features.per_dim_counts = f.value("per_dim_counts", std::vector<int>{});
    c.features.boundary_factor = f.value("boundary_factor", 1.5);
    c.features.max_features = f.value("max_features", Eigen::Index{4096});
  }
  if (j.contains("acquisition")) {
    const json& a = j.at("acquisition");
    c.acquisition.restarts = a.value("restarts", 0);
    c.acquisition.batch_restarts = a.value("batch_restarts", 50);
    c.acquisition.pool = a.value("pool", 0);
  }
  c.fit_samples = j.value("fit_samples", 500);
  c.fit_seed = j.value("fit_seed", kDefaultScaleSeed);
  if (j.contains("kernel")) {
    c.kernel = j.at("kernel").get<KernelConfig>();
  } else {
    c.kernel.reset();
  }
  c.output_dir = j.value("output_dir", std::string("."));
}

// --- Records ----------------------------------------------------------------------

void write_trial_jsonl(const TrialRecord& rec, std::ostream& out, bool include_wall_time) {
  for (const TrialRow& row : rec.rows) {
    json q = json::array();
    for (const Vector& p : row.query) q.push_back(to_std(p));
    json j = {{"benchmark", rec.benchmark},
              {"rule", rec.rule},
              {"rep", rec.repetition},
              {"seed", rec.seed},
              {"iteration", row.iteration},
              {"query", q},
              {"outcomes", row.outcomes},
              {"x_star", to_std(row.x_star)},
              {"value_at_x_star", row.value_at_x_star}};
    if (include_wall_time) j["wall_time"] = row.wall_time;
    out << j.dump() << '\n';
  }
  if (rec.aborted) {
    out << json{{"aborted", true}, {"error", rec.error}}.dump() << '\n';
  }
}

TrialRecord read_trial_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trial file '" + path + "'");
  TrialRecord rec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (j.value("aborted", false)) {
        rec.aborted = true;
        rec.error = j.value("error", std::string());
        continue;
      }
      rec.benchmark = j.at("benchmark").get<std::string>();
      rec.rule = j.at("rule").get<std::string>();
      rec.repetition = j.at("rep").get<int>();
      rec.seed = j.at("seed").get<std::uint64_t>();
      TrialRow row;
      row.iteration = j.at("iteration").get<int>();
      for (const auto& p : j.at("query")) row.query.push_back(from_std(p.get<std::vector<double>>()));
      row.outcomes = j.at("outcomes").get<std::vector<int>>();
      row.x_star = from_std(j.at("x_star").get<std::vector<double>>());
      row.value_at_x_star = j.at("value_at_x_star").get<double>();
      row.wall_time = j.value("wall_time", 0.0);
      rec.rows.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rec;
}

// --- Kernels ----------------------------------------------------------------------

KernelConfig fitted_kernel(const BenchmarkSpec& spec, int samples, std::uint64_t seed) {
  static std::mutex mutex;
  static std::map<std::tuple<std::string, int, std::uint64_t>, KernelConfig> cache;
  const auto key = std::make_tuple(spec.name, samples, seed);
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  RandomStream rng(derive_seed(seed, "fit:" + spec.name));
  const Eigen::Index d = spec.dim();
  const int n = std::max<int>(samples, static_cast<int>(10 * d));
  Matrix pts(d, n);
  Vector vals(n);
  for (int j = 0; j < n; ++j) {
    Vector u(d);
    for (Eigen::Index i = 0; i < d; ++i) u[i] = rng.uniform();
    pts.col(j) = spec.box.from_unit(u);
    vals[j] = evaluate_scaled(spec, pts.col(j));
  }
  HyperparameterFitOptions opts;
  opts.seed = rng.next_u64();
  KernelConfig k = fit_hyperparameters(spec.kernel_family, pts, vals, opts).config;
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, k);
  return k;
}

std::vector<ExperimentConfig> resolve_kernels(std::vector<ExperimentConfig> configs) {
  for (auto& c : configs) {
    if (!c.kernel) c.kernel = fitted_kernel(find_benchmark(c.benchmark), c.fit_samples, c.fit_seed);
  }
  return configs;
}

// --- Trials -----------------------------------------------------------------------

OracleFactory simulated_oracle_factory() {
  return [](const ExperimentConfig& cfg, int, RandomStream rng) -> std::unique_ptr<Oracle> {
    const OracleKind kind =
        cfg.mode == ExperimentMode::BBO ? OracleKind::Binary : OracleKind::Preference;
    return std::make_unique<SimulatedOracle>(kind, find_benchmark(cfg.benchmark), std::move(rng));
  };
}

namespace {

// Feedback for one proposal; batch queries observe every pair i < j.
std::vector<int> observe(ExperimentMode mode, Oracle& oracle, const std::vector<Vector>& pts,
                         ObservationDataset& ds, int iteration, std::uint64_t seed) {
  std::vector<int> out;
  if (mode == ExperimentMode::BBO) {
    const int c = oracle.draw_point(pts[0]);
    ds.add_binary(pts[0], c, iteration, seed);
    out.push_back(c);
    return out;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Duel duel{pts[i], pts[j]};
      const int c = oracle.draw_duel(duel);
      ds.add_duel(duel, c, iteration, seed);
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

TrialRecord run_trial(const ExperimentConfig& cfg, int repetition, const OracleFactory& factory) {
  cfg.validate();
  require(repetition >= 0, "run_trial: repetition must be >= 0");
  const BenchmarkSpec& spec = find_benchmark(cfg.benchmark);
  const KernelConfig kernel =
      cfg.kernel ? *cfg.kernel : fitted_kernel(spec, cfg.fit_samples, cfg.fit_seed);

  TrialRecord rec;
  rec.benchmark = cfg.benchmark;
  rec.rule = cfg.rule.name();
  rec.repetition = repetition;
  rec.seed = cfg.trial_seed(repetition);

  const RandomStream root(rec.seed);
  RandomStream init_rng = root.derive("init");
  RandomStream acq_rng = root.derive("acq");
  RandomStream report_rng = root.derive("report");
  const ObservationMode obs_mode =
      cfg.mode == ExperimentMode::BBO ? ObservationMode::Binary : ObservationMode::Preference;
  ObservationDataset ds(obs_mode, spec.box, kernel);
  const FeatureMap fm(spec.box, kernel, cfg.features);
  const OptimizerOptions report_opt = cfg.acquisition.single(spec.dim());

  try {
    std::unique_ptr<Oracle> oracle = factory(cfg, repetition, root.derive("oracle"));
    for (int i = 0; i < cfg.initial_samples; ++i) {
      std::vector<Vector> pts{uniform_point(spec.box, init_rng)};
      if (obs_mode == ObservationMode::Preference) pts.push_back(uniform_point(spec.box, init_rng));
      observe(cfg.mode == ExperimentMode::BBO ? ExperimentMode::BBO : ExperimentMode::PBO, *oracle,
              pts, ds, 0, rec.seed);
    }
    LatentPosterior post = LatentPosterior::fit(ds, cfg.inference);
    for (int t = 1; t <= cfg.iterations; ++t) {
      const auto start = std::chrono::steady_clock::now();
      AcquisitionRule rule = cfg.rule;
      rule.batch_size = cfg.batch_size;
      const QueryProposal proposal = propose(rule, post, fm, acq_rng, cfg.acquisition);
      TrialRow row;
      row.iteration = t;
      row.query = proposal.points;
      row.outcomes = observe(cfg.mode, *oracle, proposal.points, ds, t, rec.seed);
      post = LatentPosterior::fit(ds, cfg.inference);
      row.x_star = maximize_posterior_mean(post, report_rng, report_opt).x;
      row.value_at_x_star = evaluate_scaled(spec, row.x_star);
      row.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rec.rows.push_back(std::move(row));
    }
  } catch (const Error& e) {
    rec.aborted = true;
    rec.error = e.what();
  }
  return rec;
}

// --- Campaigns --------------------------------------------------------------------

int campaign_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("DUELOPT_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(n, 1);
}

std::string trial_path(const ExperimentConfig& cfg, int repetition) {
  return (fs::path(cfg.output_dir) / cfg.benchmark / cfg.rule.file_name() /
          ("rep" + std::to_string(repetition) + ".jsonl"))
      .string();
}

namespace {

std::string aborted_path(const std::string& complete) {
  return complete.substr(0, complete.size() - 6) + ".aborted.jsonl";
}

void write_atomically(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + tmp + "'");
  }
  fs::rename(tmp, path);
}

// A complete trial file on disk, or nullopt.
std::optional<TrialRecord> completed_on_disk(const ExperimentConfig& cfg, int rep) {
  const std::string path = trial_path(cfg, rep);
  if (!fs::exists(path)) return std::nullopt;
  try {
    TrialRecord rec = read_trial_jsonl(path);
    if (!rec.aborted && static_cast<int>(rec.rows.size()) == cfg.iterations &&
        rec.seed == cfg.trial_seed(rep) && rec.rule == cfg.rule.name()) {
      return rec;
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

}  // namespace

std::string manifest_json(const std::vector<ExperimentConfig>& configs) {
  json j = {{"format", "duelopt-manifest"}, {"version", 1}};
  j["configs"] = configs;
  return j.dump(2) + "\n";
}

void write_manifest(const std::string& path, const std::vector<ExperimentConfig>& configs) {
  write_atomically(path, manifest_json(configs));
}

std::vector<ExperimentConfig> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path + "'");
  try {
    const json j = json::parse(in);
    if (j.value("format", "") != "duelopt-manifest") {
      throw IoError("'" + path + "' is not a duelopt manifest");
    }
    return j.at("configs").get<std::vector<ExperimentConfig>>();
  } catch (const json::exception& e) {
    throw IoError("manifest '" + path + "': " + e.what());
  }
}

CampaignResult run_campaign(const std::vector<ExperimentConfig>& input,
                            const CampaignOptions& options) {
  for (const auto& c : input) c.validate();
  const std::vector<ExperimentConfig> configs = resolve_kernels(input);

  if (options.write_files) {
    std::map<std::string, std::vector<ExperimentConfig>> by_dir;
    for (const auto& c : configs) by_dir[c.output_dir].push_back(c);
    for (const auto& [dir, group] : by_dir) {
      write_manifest((fs::path(dir) / "manifest.json").string(), group);
    }
  }

  struct Job {
    std::size_t config;
    int rep;
  };
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (int r = 0; r < configs[c].repetitions; ++r) jobs.push_back({c, r});
  }

  CampaignResult result;
  result.records.resize(jobs.size());
  std::vector<bool> pending(jobs.size(), true);
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    std::optional<TrialRecord> done;
    if (options.resume && options.write_files) done = completed_on_disk(configs[jobs[i].config], jobs[i].rep);
    if (done) {
      result.records[i] = std::move(*done);
      pending[i] = false;
      ++result.skipped;
      if (options.on_trial) options.on_trial(result.records[i], true);
    } else {
      todo.push_back(i);
    }
  }

  std::mutex mutex;
  std::condition_variable ready;
  std::vector<std::size_t> finished;
  std::atomic<std::size_t> next{0};
  const int nthreads = std::min<int>(campaign_threads(options.threads),
                                     static_cast<int>(std::max<std::size_t>(todo.size(), 1)));

  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const std::size_t i = todo[k];
      TrialRecord rec;
      try {
        rec = run_trial(configs[jobs[i].config], jobs[i].rep, options.oracle);
      } catch (const std::exception& e) {
        rec.benchmark = configs[jobs[i].config].benchmark;
        rec.rule = configs[jobs[i].config].rule.name();
        rec.repetition = jobs[i].rep;
        rec.seed = configs[jobs[i].config].trial_seed(jobs[i].rep);
        rec.aborted = true;
        rec.error = e.what();
      }
      std::lock_guard<std::mutex> lock(mutex);
      result.records[i] = std::move(rec);
      finished.push_back(i);
      ready.notify_one();
    }
  };

  std::vector<std::thread> threads;
  for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);

  // Single consumer: writes files and reports progress.
  std::size_t consumed = 0;
  while (consumed < todo.size()) {
    std::vector<std::size_t> batch;
    {
      std::unique_lock<std::mutex> lock(mutex);
      ready.wait(lock, [&] { return !finished.empty(); });
      batch.swap(finished);
    }
    for (std::size_t i : batch) {
      ++consumed;
      const TrialRecord& rec = result.records[i];
      const ExperimentConfig& cfg = configs[jobs[i].config];
      if (options.write_files) {
        std::ostringstream out;
        write_trial_jsonl(rec, out);
        const std::string path = trial_path(cfg, jobs[i].rep);
        try {
          write_atomically(rec.aborted ? aborted_path(path) : path, out.str());
        } catch (const std::exception& e) {
          result.failures.push_back(path + ": " + e.what());
        }
      }
      if (rec.aborted) {
        result.failures.push_back(cfg.benchmark + "/" + rec.rule + "/rep" +
                                  std::to_string(jobs[i].rep) + ": " + rec.error);
      }
      if (options.on_trial) options.on_trial(rec, false);
    }
  }
  for (auto& t : threads) t.join();
  return result;
}

}  // namespace duelopt
