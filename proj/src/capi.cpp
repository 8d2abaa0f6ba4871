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

#include "duelopt/duelopt.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <limits>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "duelopt/acquisition.hpp"
#include "duelopt/analysis.hpp"
#include "duelopt/benchmarks.hpp"
#include "duelopt/experiments.hpp"
#include "duelopt/latent_gp.hpp"
#include "duelopt/oracle.hpp"
#include "duelopt/sampling.hpp"
#include "duelopt/uncertainty.hpp"

struct duelopt_dataset {
  duelopt::ObservationDataset data;
};

struct duelopt_posterior {
  duelopt::LatentPosterior post;
};

namespace {

using duelopt::Vector;
using nlohmann::json;

thread_local std::string last_error;

template <typename F>
duelopt_status guard(F&& body) {
  try {
    body();
    last_error.clear();
    return DUELOPT_OK;
  } catch (const duelopt::InvalidArgument& e) {
    last_error = e.what();
    return DUELOPT_ERR_INVALID_ARGUMENT;
  } catch (const duelopt::NumericalError& e) {
    last_error = e.what();
    return DUELOPT_ERR_NUMERICAL;
  } catch (const duelopt::OracleError& e) {
    last_error = e.what();
    return DUELOPT_ERR_ORACLE;
  } catch (const duelopt::IoError& e) {
    last_error = e.what();
    return DUELOPT_ERR_IO;
  } catch (const json::exception& e) {
    last_error = std::string("json: ") + e.what();
    return DUELOPT_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DUELOPT_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return DUELOPT_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw duelopt::InvalidArgument(std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Vector vec(const double* x, size_t dim) {
  need(x, "point");
  return Eigen::Map<const Vector>(x, static_cast<Eigen::Index>(dim));
}

void check_dim(size_t dim, Eigen::Index expected) {
  if (static_cast<Eigen::Index>(dim) != expected) {
    throw duelopt::InvalidArgument("dimension " + std::to_string(dim) + " does not match " +
                                   std::to_string(expected));
  }
}

}  // namespace

extern "C" {

const char* duelopt_version(void) { return "0.1.0"; }

const char* duelopt_last_error(void) { return last_error.c_str(); }

void duelopt_string_free(char* s) { std::free(s); }

duelopt_status duelopt_owens_t(double h, double a, double* out) {
  return guard([&] {
    need(out, "out");
    *out = duelopt::owens_t(h, a);
  });
}

duelopt_status duelopt_decompose(double mu, double sigma2, double* total, double* epistemic,
                                 double* aleatoric) {
  return guard([&] {
    const auto u = duelopt::decompose_variance({mu, sigma2});
    if (total) *total = u.total;
    if (epistemic) *epistemic = u.epistemic;
    if (aleatoric) *aleatoric = u.aleatoric;
  });
}

duelopt_status duelopt_bald(double mu, double sigma2, double* information,
                            double* conditional_entropy) {
  return guard([&] {
    if (information) *information = duelopt::bald_information_gain({mu, sigma2});
    if (conditional_entropy) {
      *conditional_entropy = duelopt::expected_conditional_entropy({mu, sigma2});
    }
  });
}

duelopt_status duelopt_epistemic_partials(double mu, double sigma2, double* value, double* d_mu,
                                          double* d_sigma2) {
  return guard([&] {
    const auto p = duelopt::epistemic_variance_partials({mu, sigma2});
    if (value) *value = p.value;
    if (d_mu) *d_mu = p.d_mu;
    if (d_sigma2) *d_sigma2 = p.d_sigma2;
  });
}

size_t duelopt_benchmark_count(void) { return duelopt::benchmark_registry().size(); }

duelopt_status duelopt_benchmark_name(size_t index, const char** name) {
  return guard([&] {
    need(name, "name");
    const auto& reg = duelopt::benchmark_registry();
    if (index >= reg.size()) throw duelopt::InvalidArgument("benchmark index out of range");
    *name = reg[index].name.c_str();
  });
}

duelopt_status duelopt_benchmark_dim(const char* name, size_t* dim) {
  return guard([&] {
    need(name, "name");
    need(dim, "dim");
    *dim = static_cast<size_t>(duelopt::find_benchmark(name).dim());
  });
}

duelopt_status duelopt_benchmark_box(const char* name, double* lower, double* upper,
                                     const char** kernel_family) {
  return guard([&] {
    need(name, "name");
    const auto& spec = duelopt::find_benchmark(name);
    for (Eigen::Index i = 0; i < spec.dim(); ++i) {
      if (lower) lower[i] = spec.box.lower()[i];
      if (upper) upper[i] = spec.box.upper()[i];
    }
    if (kernel_family) {
      static thread_local std::string family;
      family = duelopt::to_string(spec.kernel_family);
      *kernel_family = family.c_str();
    }
  });
}

duelopt_status duelopt_benchmark_evaluate(const char* name, const double* x, size_t dim,
                                          double* value) {
  return guard([&] {
    need(name, "name");
    need(value, "value");
    const auto& spec = duelopt::find_benchmark(name);
    check_dim(dim, spec.dim());
    *value = duelopt::evaluate_scaled(spec, vec(x, dim));
  });
}

duelopt_status duelopt_benchmark_sidecar(char** out) {
  return guard([&] {
    need(out, "out");
    *out = dup(duelopt::benchmark_sidecar_json());
  });
}

duelopt_status duelopt_rule_canonical(const char* rule, char** canonical) {
  return guard([&] {
    need(rule, "rule");
    need(canonical, "canonical");
    *canonical = dup(duelopt::AcquisitionRule::parse(rule).name());
  });
}

duelopt_status duelopt_rule_names(char** names) {
  return guard([&] {
    need(names, "names");
    std::string s;
    for (const auto& n : duelopt::rule_names()) s += n + "\n";
    *names = dup(s);
  });
}

duelopt_status duelopt_dataset_create(const char* mode, size_t dim, const double* lower,
                                      const double* upper, const char* kernel_json,
                                      duelopt_dataset** out) {
  return guard([&] {
    need(mode, "mode");
    need(kernel_json, "kernel_json");
    need(out, "out");
    duelopt::SearchBox box(vec(lower, dim), vec(upper, dim));
    const auto kernel = json::parse(kernel_json).get<duelopt::KernelConfig>();
    *out = new duelopt_dataset{
        duelopt::ObservationDataset(duelopt::parse_observation_mode(mode), box, kernel)};
  });
}

duelopt_status duelopt_dataset_load(const char* path, duelopt_dataset** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new duelopt_dataset{duelopt::ObservationDataset::load(path)};
  });
}

duelopt_status duelopt_dataset_save(const duelopt_dataset* ds, const char* path) {
  return guard([&] {
    need(ds, "dataset");
    need(path, "path");
    ds->data.save(path);
  });
}

duelopt_status duelopt_dataset_add_binary(duelopt_dataset* ds, const double* x, size_t dim,
                                          int outcome) {
  return guard([&] {
    need(ds, "dataset");
    ds->data.add_binary(vec(x, dim), outcome);
  });
}

duelopt_status duelopt_dataset_add_duel(duelopt_dataset* ds, const double* first,
                                        const double* second, size_t dim, int outcome) {
  return guard([&] {
    need(ds, "dataset");
    ds->data.add_duel({vec(first, dim), vec(second, dim)}, outcome);
  });
}

size_t duelopt_dataset_size(const duelopt_dataset* ds) { return ds ? ds->data.size() : 0; }

size_t duelopt_dataset_dim(const duelopt_dataset* ds) {
  return ds ? static_cast<size_t>(ds->data.box().dim()) : 0;
}

duelopt_status duelopt_dataset_box(const duelopt_dataset* ds, double* lower, double* upper) {
  return guard([&] {
    need(ds, "dataset");
    const auto& box = ds->data.box();
    for (Eigen::Index i = 0; i < box.dim(); ++i) {
      if (lower) lower[i] = box.lower()[i];
      if (upper) upper[i] = box.upper()[i];
    }
  });
}

void duelopt_dataset_free(duelopt_dataset* ds) { delete ds; }

duelopt_status duelopt_posterior_fit(const duelopt_dataset* ds, const char* method,
                                     duelopt_posterior** out) {
  return guard([&] {
    need(ds, "dataset");
    need(out, "out");
    duelopt::InferenceOptions opts;
    if (method) opts.method = duelopt::parse_inference_method(method);
    *out = new duelopt_posterior{duelopt::LatentPosterior::fit(ds->data, opts)};
  });
}

duelopt_status duelopt_posterior_predict(const duelopt_posterior* post, const double* x,
                                         size_t dim, double* mean, double* variance) {
  return guard([&] {
    need(post, "posterior");
    const auto p = duelopt::predict_latent(post->post, vec(x, dim));
    if (mean) *mean = p.mean;
    if (variance) *variance = p.variance;
  });
}

duelopt_status duelopt_posterior_predict_duel(const duelopt_posterior* post, const double* first,
                                              const double* second, size_t dim, double* mean,
                                              double* variance) {
  return guard([&] {
    need(post, "posterior");
    const auto p =
        duelopt::predict_latent(post->post, duelopt::Duel{vec(first, dim), vec(second, dim)});
    if (mean) *mean = p.mean;
    if (variance) *variance = p.variance;
  });
}

duelopt_status duelopt_posterior_converged(const duelopt_posterior* post, int* converged,
                                           int* iterations) {
  return guard([&] {
    need(post, "posterior");
    const auto& d = post->post.diagnostics();
    if (converged) *converged = d.converged ? 1 : 0;
    if (iterations) *iterations = d.iterations;
  });
}

void duelopt_posterior_free(duelopt_posterior* post) { delete post; }

duelopt_status duelopt_sample_posterior(const duelopt_posterior* post, const char* method,
                                        size_t n_samples, const double* points, size_t n_points,
                                        int features_per_dim, uint64_t seed, double* values,
                                        int* starvation) {
  return guard([&] {
    need(post, "posterior");
    need(method, "method");
    need(values, "values");
    const auto& ds = post->post.dataset();
    const Eigen::Index d = ds.box().dim();
    if (n_points > 0) need(points, "points");
    const Eigen::Map<const duelopt::Matrix> grid(points, d, static_cast<Eigen::Index>(n_points));
    duelopt::FeatureMapOptions fopts;
    if (features_per_dim > 0) fopts.per_dim_counts.assign(static_cast<size_t>(d), features_per_dim);
    auto fm = std::make_shared<const duelopt::FeatureMap>(ds.box(), ds.kernel(), fopts);
    duelopt::RandomStream rng(seed);
    const std::string m = method;
    std::function<duelopt::PathSample(duelopt::RandomStream&)> draw;
    if (starvation) *starvation = 0;
    if (m == "decoupled") {
      auto s = std::make_shared<duelopt::DecoupledSampler>(post->post, fm);
      draw = [s](duelopt::RandomStream& r) { return s->draw(r); };
    } else if (m == "weight-space") {
      auto s = std::make_shared<duelopt::WeightSpaceSampler>(post->post, fm);
      if (starvation) *starvation = s->variance_starvation() ? 1 : 0;
      draw = [s](duelopt::RandomStream& r) { return s->draw(r); };
    } else {
      throw duelopt::InvalidArgument("unknown sampling method '" + m +
                                     "' (expected decoupled or weight-space)");
    }
    for (size_t s = 0; s < n_samples; ++s) {
      const duelopt::PathSample path = draw(rng);
      for (size_t i = 0; i < n_points; ++i) {
        values[s * n_points + i] = path.value(grid.col(static_cast<Eigen::Index>(i)));
      }
    }
  });
}

duelopt_status duelopt_propose(const duelopt_posterior* post, const char* rule, uint64_t seed,
                               double* points, size_t capacity, size_t* n_points) {
  return guard([&] {
    need(post, "posterior");
    need(rule, "rule");
    need(n_points, "n_points");
    const auto r = duelopt::AcquisitionRule::parse(rule);
    const auto& ds = post->post.dataset();
    const duelopt::FeatureMap fm(ds.box(), ds.kernel());
    duelopt::RandomStream rng(seed);
    const auto q = duelopt::propose(r, post->post, fm, rng);
    *n_points = q.points.size();
    const Eigen::Index d = ds.box().dim();
    for (size_t i = 0; i < q.points.size() && i < capacity; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) points[i * d + k] = q.points[i][k];
    }
  });
}

duelopt_status duelopt_config_create(const char* mode, const char* benchmark, const char* rule,
                                     const char* overrides_json, char** config_json) {
  return guard([&] {
    need(mode, "mode");
    need(benchmark, "benchmark");
    need(rule, "rule");
    need(config_json, "config_json");
    auto cfg = duelopt::ExperimentConfig::defaults(duelopt::parse_experiment_mode(mode));
    cfg.benchmark = duelopt::find_benchmark(benchmark).name;
    cfg.rule = duelopt::AcquisitionRule::parse(rule);
    if (cfg.rule.family() == duelopt::RuleFamily::Batch) cfg.batch_size = cfg.rule.batch_size;
    json j = cfg;
    if (overrides_json && *overrides_json) {
      const json patch = json::parse(overrides_json);
      if (!patch.is_object()) throw duelopt::InvalidArgument("overrides must be a JSON object");
      j.merge_patch(patch);
    }
    cfg = j.get<duelopt::ExperimentConfig>();
    cfg.validate();
    *config_json = dup(json(cfg).dump());
  });
}

duelopt_status duelopt_manifest_read(const char* path, char** configs_json) {
  return guard([&] {
    need(path, "path");
    need(configs_json, "configs_json");
    *configs_json = dup(json(duelopt::read_manifest(path)).dump());
  });
}

void duelopt_campaign_options_init(duelopt_campaign_options* opts) {
  if (opts == nullptr) return;
  opts->threads = 0;
  opts->resume = 1;
  opts->interactive = 0;
  opts->write_files = 1;
}

duelopt_status duelopt_run_campaign(const char* configs_json, const duelopt_campaign_options* opts,
                                    duelopt_trial_callback callback, void* user,
                                    size_t* failures) {
  return guard([&] {
    need(configs_json, "configs_json");
    duelopt_campaign_options o;
    duelopt_campaign_options_init(&o);
    if (opts) o = *opts;
    const auto configs = json::parse(configs_json).get<std::vector<duelopt::ExperimentConfig>>();
    size_t total = 0;
    for (const auto& c : configs) total += static_cast<size_t>(c.repetitions);

    duelopt::CampaignOptions copts;
    copts.threads = o.threads;
    copts.resume = o.resume != 0;
    copts.write_files = o.write_files != 0;
    if (o.interactive) {
      copts.threads = 1;
      copts.oracle = [](const duelopt::ExperimentConfig&, int, duelopt::RandomStream) {
        return std::make_unique<duelopt::InteractiveOracle>(std::cin, std::cout);
      };
    }
    size_t completed = 0;
    copts.on_trial = [&](const duelopt::TrialRecord& rec, bool skipped) {
      ++completed;
      if (!callback) return;
      duelopt_trial_event ev{};
      ev.benchmark = rec.benchmark.c_str();
      ev.rule = rec.rule.c_str();
      ev.repetition = rec.repetition;
      ev.seed = rec.seed;
      ev.skipped = skipped ? 1 : 0;
      ev.aborted = rec.aborted ? 1 : 0;
      ev.error = rec.error.c_str();
      ev.final_value = rec.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : rec.rows.back().value_at_x_star;
      ev.completed = completed;
      ev.total = total;
      callback(&ev, user);
    };
    const auto result = duelopt::run_campaign(configs, copts);
    if (failures) *failures = result.failures.size();
  });
}

duelopt_status duelopt_mann_whitney(const double* a, size_t n, const double* b, size_t m,
                                    double* u, double* p, int* exact, int* degenerate) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    const auto r = duelopt::mann_whitney_u(std::vector<double>(a, a + n),
                                           std::vector<double>(b, b + m));
    if (u) *u = r.u;
    if (p) *p = r.p;
    if (exact) *exact = r.exact ? 1 : 0;
    if (degenerate) *degenerate = r.degenerate ? 1 : 0;
  });
}

duelopt_status duelopt_analyze(const char* input_dir, double alpha, const char* out_dir,
                               char** table, char** report_json) {
  return guard([&] {
    need(input_dir, "input_dir");
    const auto results = duelopt::load_results(input_dir);
    const auto report = duelopt::analyze_results(results, alpha);
    if (out_dir) duelopt::write_report(report, out_dir);
    if (table) *table = dup(duelopt::report_table(report));
    if (report_json) *report_json = dup(duelopt::report_json(report));
  });
}

}  // extern "C"
