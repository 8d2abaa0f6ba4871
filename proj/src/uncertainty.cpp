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

#include "duelopt/uncertainty.hpp"

#include <array>
#include <cmath>
#include <string>

#include "duelopt/normal.hpp"

namespace duelopt {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kMinSigma2 = 1e-12;

struct GaussLegendre20 {
  std::array<double, 20> nodes{};
  std::array<double, 20> weights{};

  GaussLegendre20() {
    constexpr int n = 20;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre20& gauss_legendre() {
  static const GaussLegendre20 rule;
  return rule;
}

double panel(double h2, double lo, double hi) {
  const auto& gl = gauss_legendre();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = mid + half * gl.nodes[i];
    const double q = 1.0 + t * t;
    sum += gl.weights[i] * std::exp(-0.5 * h2 * q) / q;
  }
  return sum * half;
}

double adaptive(double h2, double lo, double hi, double whole, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = panel(h2, lo, mid);
  const double right = panel(h2, mid, hi);
  const double refined = left + right;
  if (depth >= 30 || std::fabs(refined - whole) <= 1e-17 + 1e-15 * std::fabs(refined)) {
    return refined;
  }
  return adaptive(h2, lo, mid, left, depth + 1) + adaptive(h2, mid, hi, right, depth + 1);
}

// T(h, a) for h >= 0, 0 <= a <= 1.
double owens_t_integral(double h, double a) {
  if (a == 0.0) return 0.0;
  const double h2 = h * h;
  if (0.5 * h2 > 745.0) return 0.0;
  return adaptive(h2, 0.0, a, panel(h2, 0.0, a), 0) / kTwoPi;
}

}  // namespace

double owens_t(double h, double a) {
  if (!std::isfinite(h) || !std::isfinite(a)) {
    throw InvalidArgument("owens_t: non-finite input (h=" + std::to_string(h) +
                          ", a=" + std::to_string(a) + ")");
  }
  if (a == 0.0) return 0.0;
  const double sign = a < 0.0 ? -1.0 : 1.0;
  a = std::fabs(a);
  h = std::fabs(h);
  if (h == 0.0) return sign * std::atan(a) / kTwoPi;
  if (a <= 1.0) return sign * owens_t_integral(h, a);
  const double ah = a * h;
  const double ph = normal_cdf(h), qh = normal_cdf(-h);
  const double pah = normal_cdf(ah), qah = normal_cdf(-ah);
  return sign * (0.5 * (ph * qah + pah * qh) - owens_t_integral(ah, 1.0 / a));
}

double owens_t_dh(double h, double a) { return -normal_pdf(h) * (normal_cdf(a * h) - 0.5); }

double owens_t_da(double h, double a) {
  const double q = 1.0 + a * a;
  return std::exp(-0.5 * h * h * q) / (kTwoPi * q);
}

double class_probability(const MomentPair& m) {
  return normal_cdf(m.mu / std::sqrt(1.0 + std::max(m.sigma2, 0.0)));
}

namespace {

struct DecompositionTerms {
  double h, a, p, q, t;
};

DecompositionTerms terms(const MomentPair& m) {
  require(std::isfinite(m.mu) && std::isfinite(m.sigma2) && m.sigma2 >= 0.0,
          "uncertainty: moments must be finite with sigma2 >= 0");
  const double s2 = std::max(m.sigma2, kMinSigma2);
  DecompositionTerms out;
  out.h = m.mu / std::sqrt(1.0 + s2);
  out.a = 1.0 / std::sqrt(1.0 + 2.0 * s2);
  out.p = normal_cdf(out.h);
  out.q = normal_cdf(-out.h);
  out.t = owens_t(out.h, out.a);
  return out;
}

}  // namespace

UncertaintyBreakdown decompose_variance(const MomentPair& m) {
  const DecompositionTerms d = terms(m);
  UncertaintyBreakdown out;
  out.total = d.p * d.q;
  // T(h, 1) = Phi(h) Q(h) / 2, so a known latent value is purely aleatoric.
  out.aleatoric = m.sigma2 == 0.0 ? out.total : 2.0 * d.t;
  out.epistemic = std::max(out.total - out.aleatoric, 0.0);
  return out;
}

double epistemic_variance(const MomentPair& m) { return decompose_variance(m).epistemic; }

double aleatoric_variance(const MomentPair& m) { return 2.0 * terms(m).t; }

EpistemicPartials epistemic_variance_partials(const MomentPair& m) {
  const DecompositionTerms d = terms(m);
  const double s2 = std::max(m.sigma2, kMinSigma2);
  EpistemicPartials out;
  out.value = std::max(d.p * d.q - 2.0 * d.t, 0.0);
  // V = Phi(h) Q(h) - 2 T(h, a)
  const double dv_dh = (d.q - d.p) * normal_pdf(d.h) - 2.0 * owens_t_dh(d.h, d.a);
  const double dv_da = -2.0 * owens_t_da(d.h, d.a);
  const double inv_sqrt = 1.0 / std::sqrt(1.0 + s2);
  const double dh_dmu = inv_sqrt;
  const double dh_ds2 = -0.5 * m.mu * inv_sqrt * inv_sqrt * inv_sqrt;
  const double da_ds2 = -std::pow(1.0 + 2.0 * s2, -1.5);
  out.d_mu = dv_dh * dh_dmu;
  out.d_sigma2 = dv_dh * dh_ds2 + dv_da * da_ds2;
  return out;
}

Vector epistemic_variance_gradient(const MomentPair& m, const Vector& dmu_dx,
                                   const Vector& dsigma2_dx) {
  require(dmu_dx.size() == dsigma2_dx.size(),
          "epistemic_variance_gradient: gradient vectors differ in dimension");
  const EpistemicPartials p = epistemic_variance_partials(m);
  return p.d_mu * dmu_dx + p.d_sigma2 * dsigma2_dx;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

namespace {
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kBaldC2 = kPi * kLn2 / 2.0;
}  // namespace

double expected_conditional_entropy(const MomentPair& m) {
  const double s2 = std::max(m.sigma2, 0.0);
  const double denom = s2 + kBaldC2;
  return kLn2 * std::sqrt(kBaldC2 / denom) * std::exp(-m.mu * m.mu / (2.0 * denom));
}

double bald_information_gain(const MomentPair& m) {
  require(std::isfinite(m.mu) && std::isfinite(m.sigma2) && m.sigma2 >= 0.0,
          "bald_information_gain: moments must be finite with sigma2 >= 0");
  if (m.sigma2 <= kMinSigma2) return 0.0;
  const double info = binary_entropy(class_probability(m)) - expected_conditional_entropy(m);
  return std::max(info, 0.0);
}

}  // namespace duelopt
