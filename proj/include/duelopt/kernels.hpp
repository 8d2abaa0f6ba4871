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

#ifndef DUELOPT_KERNELS_HPP_
#define DUELOPT_KERNELS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "duelopt/common.hpp"

namespace duelopt {

/// Axis-aligned search box. Immutable after construction.
class SearchBox {
 public:
  SearchBox(Vector lower, Vector upper);

  Eigen::Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Vector width() const { return upper_ - lower_; }
  Vector center() const { return 0.5 * (lower_ + upper_); }

  bool contains(const Vector& x, double tol = 0.0) const;
  Vector clamp(const Vector& x) const;
  /// Maps u in [0,1]^d to the box.
  Vector from_unit(const Vector& u) const;
  Vector to_unit(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

enum class KernelFamily { SquaredExponentialARD, Matern32, Matern52 };

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);

struct KernelConfig {
  KernelFamily family = KernelFamily::SquaredExponentialARD;
  Vector lengthscales;
  double signal_variance = 1.0;
  double jitter = 1e-8;

  Eigen::Index dim() const { return lengthscales.size(); }
  void validate() const;

  static KernelConfig isotropic(KernelFamily family, Eigen::Index dim, double lengthscale,
                                double signal_variance = 1.0);
};

void to_json(nlohmann::json& j, const KernelConfig& cfg);
void from_json(const nlohmann::json& j, KernelConfig& cfg);

/// A pair of points presented for comparison.
struct Duel {
  Vector first;
  Vector second;

  Duel swapped() const { return {second, first}; }
};

/// k(x, y).
double kernel_eval(const KernelConfig& cfg, const Vector& x, const Vector& y);

/// Gradient of k(x, y) with respect to x, written into grad.
double kernel_eval_with_gradient(const KernelConfig& cfg, const Vector& x, const Vector& y,
                                 Eigen::Ref<Vector> grad);

/// Gram matrix of the columns of points (d x n), jitter on the diagonal.
Matrix gram_matrix(const KernelConfig& cfg, const Matrix& points);

/// Cross-covariance k(a_i, b_j) for columns of a and b.
Matrix cross_covariance(const KernelConfig& cfg, const Matrix& a, const Matrix& b);

/// Cholesky factor of a symmetric matrix; the diagonal is escalated by x10
/// from `jitter` up to 1e-4 until the factorization succeeds.
struct CholeskyFactor {
  Eigen::LLT<Matrix> llt;
  double jitter_used = 0.0;
};
CholeskyFactor robust_cholesky(const Matrix& k, double jitter);

/// k_g((a1,a2),(b1,b2)) = k(a1,b1) + k(a2,b2) - k(a1,b2) - k(a2,b1).
double preference_kernel_eval(const KernelConfig& cfg, const Duel& a, const Duel& b);

/// Gram matrix over duels, without jitter.
Matrix preference_gram_matrix(const KernelConfig& cfg, const std::vector<Duel>& duels);

struct HyperparameterFitOptions {
  int starts = 5;
  int max_iterations = 60;
  /// Noise variance of the regression model; keeps 500-point Gram matrices
  /// of smooth functions factorizable.
  double nugget = 1e-6;
  std::uint64_t seed = 0;
  double min_signal_variance = 1e-6;
};

struct HyperparameterFit {
  KernelConfig config;
  double log_marginal_likelihood = 0.0;
  /// Signal variance ended at its lower bound (e.g. constant data).
  bool degenerate = false;
};

/// Type-II maximum likelihood over log-lengthscales and log-signal-variance
/// by multi-start gradient ascent. points is d x n.
HyperparameterFit fit_hyperparameters(KernelFamily family, const Matrix& points,
                                      const Vector& values,
                                      const HyperparameterFitOptions& options = {});

}  // namespace duelopt

#endif  // DUELOPT_KERNELS_HPP_
