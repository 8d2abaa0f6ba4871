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

#ifndef DUELOPT_LATENT_GP_HPP_
#define DUELOPT_LATENT_GP_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "duelopt/common.hpp"
#include "duelopt/kernels.hpp"

namespace duelopt {

enum class ObservationMode { Binary, Preference };

std::string to_string(ObservationMode mode);
ObservationMode parse_observation_mode(const std::string& name);

/// One observed bit. In Preference mode c = 1 means `x` beat `x2`.
struct Observation {
  Vector x;
  Vector x2;  // empty in Binary mode
  int outcome = 0;
  int iteration = 0;
  std::uint64_t seed = 0;
};

class ObservationDataset {
 public:
  ObservationDataset(ObservationMode mode, SearchBox box, KernelConfig kernel);

  ObservationMode mode() const { return mode_; }
  const SearchBox& box() const { return box_; }
  const KernelConfig& kernel() const { return kernel_; }
  void set_kernel(KernelConfig kernel);

  std::size_t size() const { return observations_.size(); }
  bool empty() const { return observations_.empty(); }
  const std::vector<Observation>& observations() const { return observations_; }

  void add_binary(const Vector& x, int outcome, int iteration = 0, std::uint64_t seed = 0);
  void add_duel(const Duel& duel, int outcome, int iteration = 0, std::uint64_t seed = 0);
  void add(const Observation& obs);

  /// Every point that appeared in an observation, in insertion order,
  /// duplicates removed.
  std::vector<Vector> distinct_points() const;

  /// JSON-lines: a header record, then one record per observation.
  void write_jsonl(std::ostream& out) const;
  static ObservationDataset read_jsonl(std::istream& in);
  void save(const std::string& path) const;
  static ObservationDataset load(const std::string& path);

 private:
  ObservationMode mode_;
  SearchBox box_;
  KernelConfig kernel_;
  std::vector<Observation> observations_;
};

/// A linear functional of the latent function, sum_s coeffs[s] f(points.col(s)).
/// f(x) is {x; 1}; the preference g(a, b) = f(a) - f(b) is {a, b; 1, -1}.
struct LatentQuery {
  Matrix points;  // d x p
  Vector coeffs;  // p

  static LatentQuery point(const Vector& x);
  static LatentQuery duel(const Vector& first, const Vector& second);
  static LatentQuery duel(const Duel& d) { return duel(d.first, d.second); }
  Eigen::Index size() const { return coeffs.size(); }
};

/// Prior covariance between two functionals.
double prior_covariance(const KernelConfig& cfg, const LatentQuery& a, const LatentQuery& b);

enum class InferenceMethod { EP, Laplace };

std::string to_string(InferenceMethod method);
InferenceMethod parse_inference_method(const std::string& name);

struct InferenceOptions {
  InferenceMethod method = InferenceMethod::EP;
  double ep_damping = 0.5;
  double ep_tolerance = 1e-6;
  int ep_max_sweeps = 200;
  double laplace_tolerance = 1e-8;
  int laplace_max_iterations = 100;
};

struct InferenceDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
  int skipped_site_updates = 0;
};

struct LatentPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Prediction plus gradients w.r.t. each point of the query (d x p).
struct LatentPredictionGradient {
  double mean = 0.0;
  double variance = 0.0;
  Matrix dmean;
  Matrix dvariance;
};

/// Gaussian approximation q(f) = N(m, (K^-1 + W)^-1) over the training
/// functionals, from Laplace or EP. Immutable once fitted.
class LatentPosterior {
 public:
  static LatentPosterior fit(const ObservationDataset& dataset,
                             const InferenceOptions& options = {});

  const ObservationDataset& dataset() const { return dataset_; }
  const KernelConfig& kernel() const { return dataset_.kernel(); }
  InferenceMethod method() const { return method_; }
  const InferenceDiagnostics& diagnostics() const { return diagnostics_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(train_.size()); }
  const std::vector<LatentQuery>& training_queries() const { return train_; }

  LatentPrediction predict(const LatentQuery& q) const;
  LatentPredictionGradient predict_with_gradient(const LatentQuery& q) const;
  double covariance(const LatentQuery& a, const LatentQuery& b) const;

  /// Prior covariances between f(x) and every training functional.
  Vector cross_prior(const Vector& x) const;
  /// Same, with the d x n gradient w.r.t. x.
  Vector cross_prior_with_gradient(const Vector& x, Matrix& grad) const;

  /// Prior Gram matrix of the training functionals (jitter included).
  const Matrix& train_gram() const { return gram_; }
  Vector train_mean() const;
  Matrix train_covariance() const;

 private:
  LatentPosterior(ObservationDataset dataset, InferenceMethod method);
  void fit_ep(const InferenceOptions& options);
  void fit_laplace(const InferenceOptions& options);
  void finalize(const Vector& site_precision);
  Vector cross(const LatentQuery& q) const;

  ObservationDataset dataset_;
  InferenceMethod method_;
  InferenceDiagnostics diagnostics_;
  std::vector<LatentQuery> train_;
  Vector labels_;  // +-1
  Matrix gram_;
  Vector alpha_;
  Vector sqrt_w_;
  Eigen::LLT<Matrix> b_llt_;  // I + sW K sW
};

LatentPosterior fit_laplace(const ObservationDataset& dataset, InferenceOptions options = {});
LatentPosterior fit_ep(const ObservationDataset& dataset, InferenceOptions options = {});

/// mu_f(x), sigma_f^2(x); in Preference mode this is the value function.
LatentPrediction predict_latent(const LatentPosterior& post, const Vector& x);
/// mu_g, sigma_g^2 of the preference g(first, second).
LatentPrediction predict_latent(const LatentPosterior& post, const Duel& duel);
double predict_latent_cov(const LatentPosterior& post, const Vector& x, const Vector& y);
/// Preference mode only: value function by joint conditioning on the duels.
LatentPrediction predict_value_from_preferences(const LatentPosterior& post, const Vector& x);
/// Phi(mu / sqrt(1 + sigma^2)).
double predict_class_probability(const LatentPosterior& post, const Vector& x);
double predict_class_probability(const LatentPosterior& post, const Duel& duel);

}  // namespace duelopt

#endif  // DUELOPT_LATENT_GP_HPP_
