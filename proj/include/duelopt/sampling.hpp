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

#ifndef DUELOPT_SAMPLING_HPP_
#define DUELOPT_SAMPLING_HPP_

#include <memory>
#include <vector>

#include "duelopt/common.hpp"
#include "duelopt/kernels.hpp"
#include "duelopt/latent_gp.hpp"
#include "duelopt/optimizer.hpp"
#include "duelopt/random.hpp"

namespace duelopt {

/// Spectral density S(omega) of a stationary kernel (ARD, Fourier convention
/// k(r) = (2 pi)^-d int S(w) exp(i w r) dw).
double spectral_density(const KernelConfig& cfg, const Vector& omega);

/// 256 for d = 1, 16 per dimension for d = 2, 8 per dimension above.
std::vector<int> default_feature_counts(Eigen::Index dim);

struct FeatureMapOptions {
  std::vector<int> per_dim_counts;  // empty: default_feature_counts
  double boundary_factor = 1.5;
  /// Product grids larger than this keep the multi-indices with the largest
  /// spectral weights.
  Eigen::Index max_features = 4096;
};

/// Reduced-rank basis from Laplace eigenfunctions on the enlarged box
/// [c - L, c + L], L = boundary_factor * half-width:
///   phi_j(x) = prod_i L_i^-1/2 sin(pi j_i (x_i - c_i + L_i) / (2 L_i)),
/// scaled by sqrt(S(sqrt(lambda_j))) so that phi(x)' phi(y) ~ k(x, y).
class FeatureMap {
 public:
  FeatureMap(SearchBox box, KernelConfig kernel, const FeatureMapOptions& options = {});

  const SearchBox& box() const { return box_; }
  const KernelConfig& kernel() const { return kernel_; }
  const std::vector<int>& per_dim_counts() const { return counts_; }
  double boundary_factor() const { return boundary_factor_; }
  /// Number of retained basis functions.
  Eigen::Index size() const { return weights_.size(); }
  const Vector& spectral_weights() const { return weights_; }
  /// 1-based frequency multi-indices, d x size().
  const Eigen::MatrixXi& indices() const { return indices_; }
  bool truncated() const { return truncated_; }

  Vector features(const Vector& x) const;
  /// Features and their d x size() Jacobian.
  Vector features_with_gradient(const Vector& x, Matrix& jacobian) const;
  /// sum_s coeffs[s] phi(points.col(s)).
  Vector functional_features(const LatentQuery& q) const;

 private:
  void tables(const Vector& x, Matrix& sines, Matrix* cosines) const;

  SearchBox box_;
  KernelConfig kernel_;
  std::vector<int> counts_;
  double boundary_factor_;
  Vector center_;
  Vector half_;  // L_i
  Eigen::MatrixXi indices_;
  Vector weights_;
  double norm_ = 1.0;  // prod L_i^-1/2
  bool truncated_ = false;
};

FeatureMap build_feature_map(const SearchBox& box, const KernelConfig& kernel,
                             const FeatureMapOptions& options = {});
FeatureMap build_feature_map(const SearchBox& box, const KernelConfig& kernel,
                             int features_per_dim);

/// phi(first) - phi(second).
Vector preference_features(const FeatureMap& fm, const Duel& duel);

/// One approximate posterior function
///   f(x) = phi(x)' omega + sum_j v_j cov(f(x), q_j)
/// with q_j the training functionals (absent for weight-space samples).
class PathSample {
 public:
  PathSample(std::shared_ptr<const FeatureMap> features, Vector prior_weights,
             std::vector<LatentQuery> update_queries, Vector update_coeffs);

  double value(const Vector& x) const;
  double value_with_gradient(const Vector& x, Vector& grad) const;
  /// f(first) - f(second); exactly antisymmetric.
  double duel_value(const Duel& duel) const { return value(duel.first) - value(duel.second); }
  double functional_value(const LatentQuery& q) const;

  const FeatureMap& features() const { return *features_; }
  const Vector& prior_weights() const { return omega_; }
  const Vector& update_coeffs() const { return v_; }
  const std::vector<LatentQuery>& update_queries() const { return queries_; }

 private:
  std::shared_ptr<const FeatureMap> features_;
  Vector omega_;
  std::vector<LatentQuery> queries_;
  Vector v_;
};

/// Matheron-rule sampler. Factorizations are computed once and reused for
/// every draw.
class DecoupledSampler {
 public:
  DecoupledSampler(const LatentPosterior& post, std::shared_ptr<const FeatureMap> features);
  /// omega ~ N(0, I); y ~ N(mu, Sigma) at the training functionals;
  /// v = K^-1 (y - Phi omega).
  PathSample draw(RandomStream& rng) const;

 private:
  std::shared_ptr<const FeatureMap> features_;
  std::vector<LatentQuery> queries_;
  Vector mean_;
  Matrix cov_factor_;
  CholeskyFactor gram_;
  Matrix train_features_;  // n x l
};

/// Two-step weight-space sampler: y ~ N(mu, Sigma) at the training
/// functionals, then omega ~ N(A^-1 Phi' y, s2 A^-1), A = Phi' Phi + s2 I.
class WeightSpaceSampler {
 public:
  WeightSpaceSampler(const LatentPosterior& post, std::shared_ptr<const FeatureMap> features,
                     double regularizer = 1e-6);
  PathSample draw(RandomStream& rng) const;
  /// More training functionals than basis functions: the sample variance
  /// away from data is underestimated.
  bool variance_starvation() const { return starvation_; }

 private:
  std::shared_ptr<const FeatureMap> features_;
  double regularizer_;
  Vector mean_;
  Matrix cov_factor_;
  Matrix train_features_;
  Eigen::LLT<Matrix> system_;  // Phi Phi' + s2 I
  bool starvation_ = false;
};

PathSample sample_decoupled(const LatentPosterior& post, const FeatureMap& fm, RandomStream& rng);
PathSample sample_weight_space(const LatentPosterior& post, const FeatureMap& fm,
                               RandomStream& rng, double regularizer = 1e-6);

/// argmax over the box of one sample path.
OptimizerResult maximize_sample(const PathSample& sample, const SearchBox& box,
                                RandomStream& rng, const OptimizerOptions& options);

/// argmax of one decoupled sample of f (the value function in Preference mode).
Vector sample_maximizer(const LatentPosterior& post, const FeatureMap& fm, RandomStream& rng,
                        const OptimizerOptions& options);

}  // namespace duelopt

#endif  // DUELOPT_SAMPLING_HPP_
