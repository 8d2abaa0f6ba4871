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

/* C interface to the duelopt library. All handles are opaque. Every function
 * returning duelopt_status records a message retrievable with
 * duelopt_last_error() (thread-local) on failure. Strings returned through
 * char** out-parameters are owned by the caller and released with
 * duelopt_string_free(). */

#ifndef DUELOPT_DUELOPT_H_
#define DUELOPT_DUELOPT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(DUELOPT_BUILDING_LIBRARY)
#define DUELOPT_API __attribute__((visibility("default")))
#else
#define DUELOPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum duelopt_status {
  DUELOPT_OK = 0,
  DUELOPT_ERR_INVALID_ARGUMENT = 1,
  DUELOPT_ERR_NUMERICAL = 2,
  DUELOPT_ERR_ORACLE = 3,
  DUELOPT_ERR_IO = 4,
  DUELOPT_ERR_INTERNAL = 5
} duelopt_status;

typedef struct duelopt_dataset duelopt_dataset;
typedef struct duelopt_posterior duelopt_posterior;

DUELOPT_API const char* duelopt_version(void);
DUELOPT_API const char* duelopt_last_error(void);
DUELOPT_API void duelopt_string_free(char* s);

/* --- uncertainty --- */

DUELOPT_API duelopt_status duelopt_owens_t(double h, double a, double* out);
DUELOPT_API duelopt_status duelopt_decompose(double mu, double sigma2, double* total,
                                             double* epistemic, double* aleatoric);
/* BALD information gain and its expected conditional entropy term, in nats. */
DUELOPT_API duelopt_status duelopt_bald(double mu, double sigma2, double* information,
                                        double* conditional_entropy);
DUELOPT_API duelopt_status duelopt_epistemic_partials(double mu, double sigma2, double* value,
                                                      double* d_mu, double* d_sigma2);

/* --- benchmarks --- */

DUELOPT_API size_t duelopt_benchmark_count(void);
/* Borrowed pointer, valid for the life of the process. */
DUELOPT_API duelopt_status duelopt_benchmark_name(size_t index, const char** name);
DUELOPT_API duelopt_status duelopt_benchmark_dim(const char* name, size_t* dim);
/* lower/upper must hold dim values each; kernel_family may be NULL. */
DUELOPT_API duelopt_status duelopt_benchmark_box(const char* name, double* lower, double* upper,
                                                 const char** kernel_family);
DUELOPT_API duelopt_status duelopt_benchmark_evaluate(const char* name, const double* x,
                                                      size_t dim, double* value);
DUELOPT_API duelopt_status duelopt_benchmark_sidecar(char** json);

/* --- acquisition rules --- */

/* Canonical name of a rule string such as "ucb-phi:beta=2". */
DUELOPT_API duelopt_status duelopt_rule_canonical(const char* rule, char** canonical);
/* Newline-separated list of rule names. */
DUELOPT_API duelopt_status duelopt_rule_names(char** names);

/* --- datasets --- */

/* mode: "binary" or "preference". kernel_json: a kernel config object. */
DUELOPT_API duelopt_status duelopt_dataset_create(const char* mode, size_t dim,
                                                  const double* lower, const double* upper,
                                                  const char* kernel_json,
                                                  duelopt_dataset** out);
DUELOPT_API duelopt_status duelopt_dataset_load(const char* path, duelopt_dataset** out);
DUELOPT_API duelopt_status duelopt_dataset_save(const duelopt_dataset* ds, const char* path);
DUELOPT_API duelopt_status duelopt_dataset_add_binary(duelopt_dataset* ds, const double* x,
                                                      size_t dim, int outcome);
DUELOPT_API duelopt_status duelopt_dataset_add_duel(duelopt_dataset* ds, const double* first,
                                                    const double* second, size_t dim,
                                                    int outcome);
DUELOPT_API size_t duelopt_dataset_size(const duelopt_dataset* ds);
DUELOPT_API size_t duelopt_dataset_dim(const duelopt_dataset* ds);
/* lower/upper must hold dim values each. */
DUELOPT_API duelopt_status duelopt_dataset_box(const duelopt_dataset* ds, double* lower,
                                               double* upper);
DUELOPT_API void duelopt_dataset_free(duelopt_dataset* ds);

/* --- posterior --- */

/* method: "ep" or "laplace". The dataset is copied. */
DUELOPT_API duelopt_status duelopt_posterior_fit(const duelopt_dataset* ds, const char* method,
                                                 duelopt_posterior** out);
DUELOPT_API duelopt_status duelopt_posterior_predict(const duelopt_posterior* post,
                                                     const double* x, size_t dim, double* mean,
                                                     double* variance);
DUELOPT_API duelopt_status duelopt_posterior_predict_duel(const duelopt_posterior* post,
                                                          const double* first,
                                                          const double* second, size_t dim,
                                                          double* mean, double* variance);
DUELOPT_API duelopt_status duelopt_posterior_converged(const duelopt_posterior* post,
                                                       int* converged, int* iterations);
DUELOPT_API void duelopt_posterior_free(duelopt_posterior* post);

/* Draws n_samples posterior functions and evaluates them at the n_points
 * columns of points (dim x n_points, column-major). values receives
 * n_points x n_samples, column-major (one column per sample).
 * method: "decoupled" or "weight-space". features_per_dim <= 0 selects the
 * default feature budget. *starvation is set for weight-space draws whose
 * observation count exceeds the feature count. */
DUELOPT_API duelopt_status duelopt_sample_posterior(const duelopt_posterior* post,
                                                    const char* method, size_t n_samples,
                                                    const double* points, size_t n_points,
                                                    int features_per_dim, uint64_t seed,
                                                    double* values, int* starvation);

/* Proposes the next query. points receives up to capacity vectors of dim
 * values each; *n_points is set to the number of query points. */
DUELOPT_API duelopt_status duelopt_propose(const duelopt_posterior* post, const char* rule,
                                           uint64_t seed, double* points, size_t capacity,
                                           size_t* n_points);

/* --- experiments --- */

/* Resolved config for one (mode, benchmark, rule) triple. overrides_json is a
 * JSON object merged over the mode defaults; may be NULL. */
DUELOPT_API duelopt_status duelopt_config_create(const char* mode, const char* benchmark,
                                                 const char* rule, const char* overrides_json,
                                                 char** config_json);
/* JSON array of the configs stored in a campaign manifest. */
DUELOPT_API duelopt_status duelopt_manifest_read(const char* path, char** configs_json);

typedef struct duelopt_trial_event {
  const char* benchmark;
  const char* rule;
  int repetition;
  uint64_t seed;
  int skipped;  /* already complete on disk */
  int aborted;
  const char* error;    /* empty unless aborted */
  double final_value;   /* objective at the last reported maximizer; NaN if none */
  size_t completed;
  size_t total;
} duelopt_trial_event;

typedef void (*duelopt_trial_callback)(const duelopt_trial_event* event, void* user);

typedef struct duelopt_campaign_options {
  int threads;      /* <= 0: DUELOPT_THREADS or hardware concurrency */
  int resume;       /* skip trials already complete on disk */
  int interactive;  /* answer queries on stdin; forces one thread */
  int write_files;
} duelopt_campaign_options;

DUELOPT_API void duelopt_campaign_options_init(duelopt_campaign_options* opts);

/* Runs every trial of a JSON array of configs. *failures counts aborted
 * trials and write errors. */
DUELOPT_API duelopt_status duelopt_run_campaign(const char* configs_json,
                                                const duelopt_campaign_options* opts,
                                                duelopt_trial_callback callback, void* user,
                                                size_t* failures);

/* --- analysis --- */

DUELOPT_API duelopt_status duelopt_mann_whitney(const double* a, size_t n, const double* b,
                                                size_t m, double* u, double* p, int* exact,
                                                int* degenerate);
/* Ranks every rule found under input_dir. When out_dir is non-NULL the
 * report files are written there. table receives the aggregate table. */
DUELOPT_API duelopt_status duelopt_analyze(const char* input_dir, double alpha,
                                           const char* out_dir, char** table,
                                           char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* DUELOPT_DUELOPT_H_ */
