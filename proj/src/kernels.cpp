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

#include "duelopt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "duelopt/local_search.hpp"
#include "duelopt/random.hpp"

namespace duelopt {

// --- SearchBox ---------------------------------------------------------------

SearchBox::SearchBox(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(lower_.size() >= 1, "SearchBox: dimension must be >= 1");
  require(lower_.size() == upper_.size(), "SearchBox: lower/upper dimension mismatch");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    require(std::isfinite(lower_[i]) && std::isfinite(upper_[i]) && lower_[i] < upper_[i],
            "SearchBox: require lower[i] < upper[i] (finite) for all i");
  }
}

bool SearchBox::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] - tol && x[i] <= upper_[i] + tol)) return false;
  }
  return true;
}

Vector SearchBox::clamp(const Vector& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

Vector SearchBox::from_unit(const Vector& u) const {
  return lower_ + (upper_ - lower_).cwiseProduct(u);
}

Vector SearchBox::to_unit(const Vector& x) const {
  return (x - lower_).cwiseQuotient(upper_ - lower_);
}

// --- KernelConfig ------------------------------------------------------------

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponentialARD: return "se_ard";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "se_ard" || name == "se") return KernelFamily::SquaredExponentialARD;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  throw InvalidArgument("unknown kernel family '" + name +
                        "' (expected se_ard, matern32 or matern52)");
}

void KernelConfig::validate() const {
  require(lengthscales.size() >= 1, "KernelConfig: need at least one lengthscale");
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    require(std::isfinite(lengthscales[i]) && lengthscales[i] > 0.0,
            "KernelConfig: lengthscales must be positive");
  }
  require(std::isfinite(signal_variance) && signal_variance > 0.0,
          "KernelConfig: signal_variance must be positive");
  require(std::isfinite(jitter) && jitter > 0.0, "KernelConfig: jitter must be positive");
}

KernelConfig KernelConfig::isotropic(KernelFamily family, Eigen::Index dim, double lengthscale,
                                     double signal_variance) {
  KernelConfig cfg;
  cfg.family = family;
  cfg.lengthscales = Vector::Constant(dim, lengthscale);
  cfg.signal_variance = signal_variance;
  cfg.validate();
  return cfg;
}

void to_json(nlohmann::json& j, const KernelConfig& cfg) {
  j = nlohmann::json{{"family", to_string(cfg.family)},
                     {"lengthscales", std::vector<double>(cfg.lengthscales.data(),
                                                          cfg.lengthscales.data() +
                                                              cfg.lengthscales.size())},
                     {"signal_variance", cfg.signal_variance},
                     {"jitter", cfg.jitter}};
}

void from_json(const nlohmann::json& j, KernelConfig& cfg) {
  cfg.family = parse_kernel_family(j.at("family").get<std::string>());
  const auto ls = j.at("lengthscales").get<std::vector<double>>();
  cfg.lengthscales = Eigen::Map<const Vector>(ls.data(), static_cast<Eigen::Index>(ls.size()));
  cfg.signal_variance = j.at("signal_variance").get<double>();
  cfg.jitter = j.value("jitter", 1e-8);
  cfg.validate();
}

// --- Evaluation --------------------------------------------------------------

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.2360679774997897;

// Radial profile: value k(r) and G(r) = -k'(r) / r, so that
// dk/dx_i = -G * (x_i - y_i) / l_i^2 and dk/dlog(l_i) = G * (x_i - y_i)^2 / l_i^2.
struct Radial {
  double value;
  double g;
};

Radial radial(KernelFamily family, double sv, double r2) {
  switch (family) {
    case KernelFamily::SquaredExponentialARD: {
      const double k = sv * std::exp(-0.5 * r2);
      return {k, k};
    }
    case KernelFamily::Matern32: {
      const double r = std::sqrt(r2);
      const double e = std::exp(-kSqrt3 * r);
      return {sv * (1.0 + kSqrt3 * r) * e, 3.0 * sv * e};
    }
    case KernelFamily::Matern52: {
      const double r = std::sqrt(r2);
      const double e = std::exp(-kSqrt5 * r);
      return {sv * (1.0 + kSqrt5 * r + 5.0 * r2 / 3.0) * e,
              (5.0 / 3.0) * sv * (1.0 + kSqrt5 * r) * e};
    }
  }
  return {0.0, 0.0};
}

double scaled_sq_dist(const KernelConfig& cfg, const Vector& x, const Vector& y) {
  return (x - y).cwiseQuotient(cfg.lengthscales).squaredNorm();
}

void check_dims(const KernelConfig& cfg, const Vector& x, const Vector& y) {
  if (x.size() != cfg.dim() || y.size() != cfg.dim()) {
    throw InvalidArgument("kernel: point dimension does not match kernel dimension " +
                          std::to_string(cfg.dim()));
  }
}

}  // namespace

double kernel_eval(const KernelConfig& cfg, const Vector& x, const Vector& y) {
  check_dims(cfg, x, y);
  return radial(cfg.family, cfg.signal_variance, scaled_sq_dist(cfg, x, y)).value;
}

double kernel_eval_with_gradient(const KernelConfig& cfg, const Vector& x, const Vector& y,
                                 Eigen::Ref<Vector> grad) {
  check_dims(cfg, x, y);
  const Radial rad = radial(cfg.family, cfg.signal_variance, scaled_sq_dist(cfg, x, y));
  grad = -rad.g * (x - y).cwiseQuotient(cfg.lengthscales.cwiseAbs2());
  return rad.value;
}

Matrix cross_covariance(const KernelConfig& cfg, const Matrix& a, const Matrix& b) {
  require(a.rows() == cfg.dim() && b.rows() == cfg.dim(),
          "cross_covariance: point dimension does not match kernel");
  const Vector inv_ls = cfg.lengthscales.cwiseInverse();
  const Matrix as = inv_ls.asDiagonal() * a;
  const Matrix bs = inv_ls.asDiagonal() * b;
  Matrix k(a.cols(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      const double r2 = (as.col(i) - bs.col(j)).squaredNorm();
      k(i, j) = radial(cfg.family, cfg.signal_variance, r2).value;
    }
  }
  return k;
}

Matrix gram_matrix(const KernelConfig& cfg, const Matrix& points) {
  require(points.cols() >= 1, "gram_matrix: need at least one point");
  Matrix k = cross_covariance(cfg, points, points);
  // Exact symmetry regardless of rounding in the distance computation.
  k = 0.5 * (k + k.transpose()).eval();
  k.diagonal().array() += cfg.jitter;
  return k;
}

CholeskyFactor robust_cholesky(const Matrix& k, double jitter) {
  CholeskyFactor out;
  out.llt.compute(k);
  if (out.llt.info() == Eigen::Success) return out;
  for (double extra = std::max(jitter, 1e-12) * 10.0; extra <= 1e-4 * (1 + 1e-12); extra *= 10.0) {
    Matrix kj = k;
    kj.diagonal().array() += extra;
    out.llt.compute(kj);
    if (out.llt.info() == Eigen::Success) {
      out.jitter_used = extra;
      return out;
    }
  }
  throw NumericalError("Cholesky factorization failed after jitter escalation to 1e-4 "
                       "(ill-conditioned inputs)");
}

double preference_kernel_eval(const KernelConfig& cfg, const Duel& a, const Duel& b) {
  return kernel_eval(cfg, a.first, b.first) + kernel_eval(cfg, a.second, b.second) -
         kernel_eval(cfg, a.first, b.second) - kernel_eval(cfg, a.second, b.first);
}

Matrix preference_gram_matrix(const KernelConfig& cfg, const std::vector<Duel>& duels) {
  const auto n = static_cast<Eigen::Index>(duels.size());
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = preference_kernel_eval(cfg, duels[i], duels[j]);
    }
  }
  return k;
}

// --- Hyperparameter fitting ---------------------------------------------------

namespace {

struct MarginalLikelihood {
  KernelFamily family;
  const Matrix& points;
  const Vector& values;
  double nugget;

  KernelConfig config(const Vector& theta) const {
    KernelConfig cfg;
    cfg.family = family;
    const Eigen::Index d = points.rows();
    cfg.lengthscales = theta.head(d).array().exp();
    cfg.signal_variance = std::exp(theta[d]);
    return cfg;
  }

  // Log marginal likelihood and (optionally) its gradient w.r.t. theta.
  double operator()(const Vector& theta, Vector* grad) const {
    const KernelConfig cfg = config(theta);
    const Eigen::Index n = points.cols();
    const Eigen::Index d = points.rows();
    const Matrix kf = cross_covariance(cfg, points, points);
    Matrix k = kf;
    k.diagonal().array() += nugget;
    Eigen::LLT<Matrix> llt(k);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const Vector alpha = llt.solve(values);
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double lml =
        -0.5 * values.dot(alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * 3.14159265358979323846);
    if (grad == nullptr) return lml;

    const Matrix kinv = llt.solve(Matrix::Identity(n, n));
    const Matrix w = alpha * alpha.transpose() - kinv;  // dL/dK * 2
    grad->resize(d + 1);
    grad->setZero();
    const Vector inv_ls2 = cfg.lengthscales.cwiseAbs2().cwiseInverse();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Vector diff = points.col(i) - points.col(j);
        const double r2 = diff.cwiseAbs2().dot(inv_ls2);
        const Radial rad = radial(family, cfg.signal_variance, r2);
        const double wij = w(i, j);
        for (Eigen::Index t = 0; t < d; ++t) {
          (*grad)[t] += 0.5 * wij * rad.g * diff[t] * diff[t] * inv_ls2[t];
        }
        (*grad)[d] += 0.5 * wij * rad.value;
      }
    }
    return lml;
  }
};

}  // namespace

HyperparameterFit fit_hyperparameters(KernelFamily family, const Matrix& points,
                                      const Vector& values,
                                      const HyperparameterFitOptions& options) {
  const Eigen::Index d = points.rows();
  const Eigen::Index n = points.cols();
  require(d >= 1 && n >= 2, "fit_hyperparameters: need at least two d-dimensional samples");
  require(values.size() == n, "fit_hyperparameters: values/points size mismatch");
  require(n >= 10 * d, "fit_hyperparameters: need at least 10*d samples");

  const Vector lo_pt = points.rowwise().minCoeff();
  const Vector hi_pt = points.rowwise().maxCoeff();
  Vector span = (hi_pt - lo_pt).cwiseMax(1e-12);
  const double mean = values.mean();
  const double var = (values.array() - mean).square().sum() / static_cast<double>(n - 1);

  HyperparameterFit result;
  result.config.family = family;
  if (!(var > 1e-12 * (1.0 + mean * mean))) {
    result.config.lengthscales = span;
    result.config.signal_variance = options.min_signal_variance;
    result.degenerate = true;
    result.log_marginal_likelihood = std::numeric_limits<double>::quiet_NaN();
    return result;
  }

  Vector lower(d + 1), upper(d + 1);
  lower.head(d) = (span * 1e-3).array().log();
  upper.head(d) = (span * 10.0).array().log();
  const double second_moment = values.squaredNorm() / static_cast<double>(n);
  lower[d] = std::log(options.min_signal_variance);
  upper[d] = std::log(std::max(100.0 * second_moment, 10.0 * options.min_signal_variance));

  MarginalLikelihood lml{family, points, values, options.nugget};
  SmoothObjective objective = [&](const Vector& theta, Vector* g) { return lml(theta, g); };

  RandomStream rng(options.seed);
  static constexpr double kInitialFractions[] = {0.1, 0.3, 1.0, 0.03};
  double best = -std::numeric_limits<double>::infinity();
  Vector best_theta;
  LocalSearchOptions ls;
  ls.max_iterations = options.max_iterations;
  ls.value_tolerance = 1e-10;
  for (int s = 0; s < options.starts; ++s) {
    Vector theta(d + 1);
    for (Eigen::Index t = 0; t < d; ++t) {
      const double frac = s < 4 ? kInitialFractions[s] : std::exp(rng.uniform(std::log(0.01), 0.0));
      theta[t] = std::log(frac * span[t]);
    }
    theta[d] = std::log(std::max(second_moment, options.min_signal_variance));
    theta = theta.cwiseMax(lower).cwiseMin(upper);
    const LocalSearchResult r = maximize_local(objective, true, theta, lower, upper, ls);
    if (std::isfinite(r.value) && r.value > best) {
      best = r.value;
      best_theta = r.x;
    }
  }
  if (!std::isfinite(best)) {
    throw NumericalError("fit_hyperparameters: marginal likelihood not finite at any start");
  }
  result.config = lml.config(best_theta);
  result.log_marginal_likelihood = best;
  result.degenerate = best_theta[d] <= lower[d] + 1e-9;
  return result;
}

}  // namespace duelopt
