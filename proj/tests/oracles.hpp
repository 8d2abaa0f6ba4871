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

// Independent reference computations used by the tests. Nothing here calls
// into the library under test.

#ifndef DUELOPT_TESTS_ORACLES_HPP_
#define DUELOPT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double phi_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

// Nodes and weights for E[g(Z)], Z ~ N(0,1), by Golub-Welsch on the
// probabilists' Hermite recurrence.
struct Quadrature {
  std::vector<double> nodes, weights;
};

inline Quadrature gauss_hermite(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  Quadrature q;
  for (int i = 0; i < n; ++i) {
    q.nodes.push_back(eig.eigenvalues()[i]);
    q.weights.push_back(eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i));
  }
  return q;
}

// V[Phi(f)], f ~ N(mu, s2). Integrates over f for s2 <= 1; for wider
// posteriors integrates over the noise variables instead, where the
// integrand stays smooth:
//   E[Phi(f)]   = E_e[Phi((mu - e)/s)]
//   E[Phi(f)^2] = E_m[2 Phi(m) Phi((mu - m)/s)],  m = max of two noises.
inline double epistemic_variance(double mu, double s2, int nodes = 200) {
  static const Quadrature gh = gauss_hermite(nodes);
  const double s = std::sqrt(s2);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    const double z = gh.nodes[i], w = gh.weights[i];
    if (s2 <= 1.0) {
      const double p = phi_cdf(mu + s * z);
      m1 += w * p;
      m2 += w * p * p;
    } else {
      const double p = phi_cdf((mu - z) / s);
      m1 += w * p;
      m2 += w * 2.0 * phi_cdf(z) * p;
    }
  }
  return m2 - m1 * m1;
}

// E[g(f)], f ~ N(mu, s2), plain Gauss-Hermite in f.
inline double gaussian_expectation(const std::function<double(double)>& g, double mu, double s2,
                                   int nodes) {
  const Quadrature gh = gauss_hermite(nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    acc += gh.weights[i] * g(mu + std::sqrt(s2) * gh.nodes[i]);
  }
  return acc;
}

// Owen's T by composite Simpson on the defining integral.
inline double owens_t(double h, double a, int panels = 200000) {
  if (a == 0.0) return 0.0;
  auto f = [h](double t) { return std::exp(-0.5 * h * h * (1.0 + t * t)) / (1.0 + t * t); };
  const double dt = a / panels;
  double s = f(0.0) + f(a);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * dt);
  return s * dt / 3.0 / (2.0 * kPi);
}

// Exact predictive class probability at a probe for a 2-point binary
// dataset: latent values at the training inputs are written f = L z with
// K = L L', and z is integrated on a uniform grid over [-7, 7]^2.
//   k2: 2x2 prior covariance at training inputs (jitter included)
//   y:  labels in {-1, +1}
//   kx: prior covariance between probe and training inputs; kxx: probe prior variance.
inline double grid_class_probability(const Eigen::Matrix2d& k2, const Eigen::Vector2d& y,
                                     const Eigen::Vector2d& kx, double kxx, int grid = 400) {
  const Eigen::Matrix2d l = k2.llt().matrixL();
  const Eigen::Vector2d proj = k2.ldlt().solve(kx);  // K^{-1} k_x
  const double cond_var = std::max(kxx - kx.dot(proj), 0.0);
  const double scale = 1.0 / std::sqrt(1.0 + cond_var);
  const double lo = -7.0, hi = 7.0, dz = (hi - lo) / grid;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double z1 = lo + (i + 0.5) * dz;
    for (int j = 0; j < grid; ++j) {
      const double z2 = lo + (j + 0.5) * dz;
      const Eigen::Vector2d f = l * Eigen::Vector2d(z1, z2);
      const double w = phi_pdf(z1) * phi_pdf(z2) * phi_cdf(y[0] * f[0]) * phi_cdf(y[1] * f[1]);
      num += w * phi_cdf(proj.dot(f) * scale);
      den += w;
    }
  }
  return num / den;
}

// One-sided Mann-Whitney p-value P(U >= U_obs) by enumerating every split
// of the pooled sample; U counts pairs a_i > b_j plus half the ties.
inline std::pair<double, double> mann_whitney_enumerate(const std::vector<double>& a,
                                                        const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const int n = static_cast<int>(a.size()), total = static_cast<int>(pooled.size());
  auto u_of = [&](const std::vector<bool>& in_a) {
    double u = 0.0;
    for (int i = 0; i < total; ++i) {
      if (!in_a[i]) continue;
      for (int j = 0; j < total; ++j) {
        if (in_a[j]) continue;
        if (pooled[i] > pooled[j]) u += 1.0;
        else if (pooled[i] == pooled[j]) u += 0.5;
      }
    }
    return u;
  };
  std::vector<bool> mask(total, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  const double u_obs = u_of(mask);
  double hits = 0.0, count = 0.0;
  // Lexicographically largest first; prev_permutation walks every subset once.
  do {
    count += 1.0;
    if (u_of(mask) >= u_obs) hits += 1.0;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return {u_obs, hits / count};
}

// Argmax of f on a uniform grid of `points` nodes over [lo, hi].
inline std::pair<double, double> grid_argmax(const std::function<double(double)>& f, double lo,
                                             double hi, int points) {
  double best_x = lo, best = -INFINITY;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return {best_x, best};
}

}  // namespace oracle

#endif  // DUELOPT_TESTS_ORACLES_HPP_
