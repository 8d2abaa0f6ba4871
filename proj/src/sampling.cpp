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

#include "duelopt/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "duelopt/normal.hpp"

namespace duelopt {

double spectral_density(const KernelConfig& cfg, const Vector& omega) {
  require(omega.size() == cfg.dim(), "spectral_density: dimension mismatch");
  const double d = static_cast<double>(cfg.dim());
  const double r2 = omega.cwiseProduct(cfg.lengthscales).squaredNorm();
  const double ls_prod = cfg.lengthscales.prod();
  switch (cfg.family) {
    case KernelFamily::SquaredExponentialARD:
      return cfg.signal_variance * std::pow(2.0 * kPi, 0.5 * d) * ls_prod * std::exp(-0.5 * r2);
    case KernelFamily::Matern32:
    case KernelFamily::Matern52: {
      const double nu = cfg.family == KernelFamily::Matern32 ? 1.5 : 2.5;
      const double log_c = d * std::log(2.0) + 0.5 * d * std::log(kPi) +
                           std::lgamma(nu + 0.5 * d) - std::lgamma(nu) + nu * std::log(2.0 * nu);
      return cfg.signal_variance * ls_prod *
             std::exp(log_c - (nu + 0.5 * d) * std::log(2.0 * nu + r2));
    }
  }
  throw InvalidArgument("spectral_density: unsupported kernel family");
}

std::vector<int> default_feature_counts(Eigen::Index dim) {
  if (dim == 1) return {256};
  if (dim == 2) return {16, 16};
  return std::vector<int>(static_cast<std::size_t>(dim), 8);
}

// --- FeatureMap ----------------------------------------------------------------

FeatureMap::FeatureMap(SearchBox box, KernelConfig kernel, const FeatureMapOptions& options)
    : box_(std::move(box)), kernel_(std::move(kernel)), boundary_factor_(options.boundary_factor) {
  kernel_.validate();
  const Eigen::Index d = box_.dim();
  require(kernel_.dim() == d, "FeatureMap: kernel and box dimensions differ");
  require(boundary_factor_ > 1.0, "FeatureMap: boundary factor must exceed 1");
  require(options.max_features >= 1, "FeatureMap: max_features must be >= 1");
  counts_ = options.per_dim_counts.empty() ? default_feature_counts(d) : options.per_dim_counts;
  require(static_cast<Eigen::Index>(counts_.size()) == d,
          "FeatureMap: one feature count per dimension required");
  for (int c : counts_) require(c >= 1, "FeatureMap: feature counts must be >= 1");

  center_ = box_.center();
  half_ = 0.5 * boundary_factor_ * box_.width();
  norm_ = half_.cwiseInverse().cwiseSqrt().prod();

  Eigen::Index total = 1;
  for (int c : counts_) total *= c;
  Eigen::MatrixXi all(d, total);
  Vector weights(total);
  std::vector<int> idx(static_cast<std::size_t>(d), 1);
  Vector omega(d);
  for (Eigen::Index t = 0; t < total; ++t) {
    for (Eigen::Index i = 0; i < d; ++i) {
      all(i, t) = idx[i];
      omega[i] = kPi * idx[i] / (2.0 * half_[i]);
    }
    weights[t] = std::sqrt(spectral_density(kernel_, omega));
    for (Eigen::Index i = d - 1; i >= 0; --i) {
      if (++idx[i] <= counts_[i]) break;
      idx[i] = 1;
    }
  }
  if (total <= options.max_features) {
    indices_ = std::move(all);
    weights_ = std::move(weights);
    return;
  }
  truncated_ = true;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return weights[a] > weights[b]; });
  order.resize(static_cast<std::size_t>(options.max_features));
  std::sort(order.begin(), order.end());
  indices_.resize(d, options.max_features);
  weights_.resize(options.max_features);
  for (Eigen::Index t = 0; t < options.max_features; ++t) {
    indices_.col(t) = all.col(order[t]);
    weights_[t] = weights[order[t]];
  }
}

void FeatureMap::tables(const Vector& x, Matrix& sines, Matrix* cosines) const {
  const Eigen::Index d = box_.dim();
  require(x.size() == d, "FeatureMap: point dimension mismatch");
  const int max_count = *std::max_element(counts_.begin(), counts_.end());
  sines.resize(d, max_count);
  if (cosines != nullptr) cosines->resize(d, max_count);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double theta = kPi * (x[i] - center_[i] + half_[i]) / (2.0 * half_[i]);
    for (int j = 1; j <= counts_[i]; ++j) {
      sines(i, j - 1) = std::sin(j * theta);
      if (cosines != nullptr) {
        (*cosines)(i, j - 1) = std::cos(j * theta) * kPi * j / (2.0 * half_[i]);
      }
    }
  }
}

Vector FeatureMap::features(const Vector& x) const {
  Matrix s;
  tables(x, s, nullptr);
  const Eigen::Index d = box_.dim();
  Vector out(size());
  for (Eigen::Index t = 0; t < size(); ++t) {
    double p = norm_ * weights_[t];
    for (Eigen::Index i = 0; i < d; ++i) p *= s(i, indices_(i, t) - 1);
    out[t] = p;
  }
  return out;
}

Vector FeatureMap::features_with_gradient(const Vector& x, Matrix& jacobian) const {
  Matrix s, c;
  tables(x, s, &c);
  const Eigen::Index d = box_.dim();
  Vector out(size());
  jacobian.resize(d, size());
  for (Eigen::Index t = 0; t < size(); ++t) {
    const double w = norm_ * weights_[t];
    double p = w;
    for (Eigen::Index i = 0; i < d; ++i) p *= s(i, indices_(i, t) - 1);
    out[t] = p;
    for (Eigen::Index i = 0; i < d; ++i) {
      double g = w * c(i, indices_(i, t) - 1);
      for (Eigen::Index k = 0; k < d; ++k) {
        if (k != i) g *= s(k, indices_(k, t) - 1);
      }
      jacobian(i, t) = g;
    }
  }
  return out;
}

Vector FeatureMap::functional_features(const LatentQuery& q) const {
  Vector out = Vector::Zero(size());
  for (Eigen::Index s = 0; s < q.size(); ++s) out += q.coeffs[s] * features(q.points.col(s));
  return out;
}

FeatureMap build_feature_map(const SearchBox& box, const KernelConfig& kernel,
                             const FeatureMapOptions& options) {
  return FeatureMap(box, kernel, options);
}

FeatureMap build_feature_map(const SearchBox& box, const KernelConfig& kernel,
                             int features_per_dim) {
  require(features_per_dim >= 1, "build_feature_map: features_per_dim must be >= 1");
  FeatureMapOptions o;
  o.per_dim_counts.assign(static_cast<std::size_t>(box.dim()), features_per_dim);
  Eigen::Index total = 1;
  for (Eigen::Index i = 0; i < box.dim(); ++i) total *= features_per_dim;
  o.max_features = std::max(o.max_features, total);
  return FeatureMap(box, kernel, o);
}

Vector preference_features(const FeatureMap& fm, const Duel& duel) {
  return fm.features(duel.first) - fm.features(duel.second);
}

// --- PathSample ------------------------------------------------------------------

PathSample::PathSample(std::shared_ptr<const FeatureMap> features, Vector prior_weights,
                       std::vector<LatentQuery> update_queries, Vector update_coeffs)
    : features_(std::move(features)),
      omega_(std::move(prior_weights)),
      queries_(std::move(update_queries)),
      v_(std::move(update_coeffs)) {
  require(features_ != nullptr, "PathSample: feature map required");
  require(omega_.size() == features_->size(), "PathSample: weight/feature count mismatch");
  require(static_cast<Eigen::Index>(queries_.size()) == v_.size(),
          "PathSample: update coefficient count mismatch");
}

double PathSample::value(const Vector& x) const {
  double f = features_->features(x).dot(omega_);
  const KernelConfig& cfg = features_->kernel();
  for (std::size_t j = 0; j < queries_.size(); ++j) {
    const LatentQuery& q = queries_[j];
    double c = 0.0;
    for (Eigen::Index r = 0; r < q.size(); ++r) c += q.coeffs[r] * kernel_eval(cfg, x, q.points.col(r));
    f += v_[static_cast<Eigen::Index>(j)] * c;
  }
  return f;
}

double PathSample::value_with_gradient(const Vector& x, Vector& grad) const {
  Matrix jac;
  double f = features_->features_with_gradient(x, jac).dot(omega_);
  grad = jac * omega_;
  const KernelConfig& cfg = features_->kernel();
  Vector g(x.size());
  for (std::size_t j = 0; j < queries_.size(); ++j) {
    const LatentQuery& q = queries_[j];
    const double vj = v_[static_cast<Eigen::Index>(j)];
    for (Eigen::Index r = 0; r < q.size(); ++r) {
      const double k = kernel_eval_with_gradient(cfg, x, q.points.col(r), g);
      f += vj * q.coeffs[r] * k;
      grad += vj * q.coeffs[r] * g;
    }
  }
  return f;
}

double PathSample::functional_value(const LatentQuery& q) const {
  double out = 0.0;
  for (Eigen::Index s = 0; s < q.size(); ++s) out += q.coeffs[s] * value(q.points.col(s));
  return out;
}

// --- Samplers ----------------------------------------------------------------------

namespace {

Matrix covariance_factor(const Matrix& cov) {
  if (cov.size() == 0) return Matrix();
  const CholeskyFactor f = robust_cholesky(cov, 1e-12);
  return f.llt.matrixL();
}

Matrix training_features(const FeatureMap& fm, const std::vector<LatentQuery>& queries) {
  Matrix out(static_cast<Eigen::Index>(queries.size()), fm.size());
  for (std::size_t j = 0; j < queries.size(); ++j) {
    out.row(static_cast<Eigen::Index>(j)) = fm.functional_features(queries[j]).transpose();
  }
  return out;
}

void check_compatible(const LatentPosterior& post, const FeatureMap& fm) {
  require(post.kernel().dim() == fm.box().dim(), "sampler: feature map dimension mismatch");
}

}  // namespace

DecoupledSampler::DecoupledSampler(const LatentPosterior& post,
                                   std::shared_ptr<const FeatureMap> features)
    : features_(std::move(features)), queries_(post.training_queries()) {
  require(features_ != nullptr, "DecoupledSampler: feature map required");
  check_compatible(post, *features_);
  if (queries_.empty()) return;
  mean_ = post.train_mean();
  cov_factor_ = covariance_factor(post.train_covariance());
  gram_ = robust_cholesky(post.train_gram(), post.kernel().jitter);
  train_features_ = training_features(*features_, queries_);
}

PathSample DecoupledSampler::draw(RandomStream& rng) const {
  Vector omega = rng.normal_vector(features_->size());
  if (queries_.empty()) return PathSample(features_, std::move(omega), {}, Vector());
  const Vector z = rng.normal_vector(mean_.size());
  const Vector y = mean_ + cov_factor_ * z;
  Vector v = gram_.llt.solve(y - train_features_ * omega);
  return PathSample(features_, std::move(omega), queries_, std::move(v));
}

WeightSpaceSampler::WeightSpaceSampler(const LatentPosterior& post,
                                       std::shared_ptr<const FeatureMap> features,
                                       double regularizer)
    : features_(std::move(features)), regularizer_(regularizer) {
  require(features_ != nullptr, "WeightSpaceSampler: feature map required");
  require(regularizer > 0.0, "WeightSpaceSampler: regularizer must be positive");
  check_compatible(post, *features_);
  const Eigen::Index n = post.size();
  starvation_ = n > features_->size();
  if (n == 0) return;
  mean_ = post.train_mean();
  cov_factor_ = covariance_factor(post.train_covariance());
  train_features_ = training_features(*features_, post.training_queries());
  // The n x n form of the Gaussian linear-model posterior; same law as the
  // l x l form, cheaper when l > n.
  Matrix s = train_features_ * train_features_.transpose();
  s.diagonal().array() += regularizer_;
  system_.compute(s);
  if (system_.info() != Eigen::Success) {
    throw NumericalError("weight-space sampler: linear system factorization failed");
  }
}

PathSample WeightSpaceSampler::draw(RandomStream& rng) const {
  Vector omega = rng.normal_vector(features_->size());
  if (mean_.size() == 0) return PathSample(features_, std::move(omega), {}, Vector());
  const Vector z = rng.normal_vector(mean_.size());
  const Vector y = mean_ + cov_factor_ * z;
  const Vector eps = std::sqrt(regularizer_) * rng.normal_vector(mean_.size());
  // omega | y ~ N(A^-1 Phi' y, s2 A^-1) by conditioning a prior draw.
  omega += train_features_.transpose() * system_.solve(y - train_features_ * omega - eps);
  return PathSample(features_, std::move(omega), {}, Vector());
}

PathSample sample_decoupled(const LatentPosterior& post, const FeatureMap& fm, RandomStream& rng) {
  return DecoupledSampler(post, std::make_shared<const FeatureMap>(fm)).draw(rng);
}

PathSample sample_weight_space(const LatentPosterior& post, const FeatureMap& fm,
                               RandomStream& rng, double regularizer) {
  return WeightSpaceSampler(post, std::make_shared<const FeatureMap>(fm), regularizer).draw(rng);
}

OptimizerResult maximize_sample(const PathSample& sample, const SearchBox& box,
                                RandomStream& rng, const OptimizerOptions& options) {
  SmoothObjective obj = [&](const Vector& x, Vector* grad) {
    if (grad == nullptr) return sample.value(x);
    return sample.value_with_gradient(x, *grad);
  };
  OptimizerResult r = optimize_inner(obj, true, box, rng, options);
  if (!std::isfinite(r.value)) throw NumericalError("sample_maximizer: non-finite optimum");
  return r;
}

Vector sample_maximizer(const LatentPosterior& post, const FeatureMap& fm, RandomStream& rng,
                        const OptimizerOptions& options) {
  const PathSample sample = sample_decoupled(post, fm, rng);
  return maximize_sample(sample, post.dataset().box(), rng, options).x;
}

}  // namespace duelopt
