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

#ifndef DUELOPT_UNCERTAINTY_HPP_
#define DUELOPT_UNCERTAINTY_HPP_

#include "duelopt/common.hpp"

namespace duelopt {

/// Owen's T function
///   T(h, a) = 1/(2 pi) * int_0^a exp(-h^2 (1 + t^2) / 2) / (1 + t^2) dt.
///
/// For |a| <= 1 the integral is evaluated by adaptive 20-point Gauss-Legendre
/// (absolute error well below 1e-14); for |a| > 1 the reflection
/// T(h, a) = [Phi(h) Q(ah) + Phi(ah) Q(h)] / 2 - T(ah, 1/a) is used.
/// Throws InvalidArgument for non-finite input.
double owens_t(double h, double a);

/// dT/dh = -phi(h) (Phi(a h) - 1/2).
double owens_t_dh(double h, double a);

/// dT/da = exp(-h^2 (1 + a^2) / 2) / (2 pi (1 + a^2)).
double owens_t_da(double h, double a);

/// Latent predictive moments at one input: f ~ N(mu, sigma2).
struct MomentPair {
  double mu = 0.0;
  double sigma2 = 0.0;
};

/// Law-of-total-variance split of Var(c) for c | f ~ Bernoulli(Phi(f)).
struct UncertaintyBreakdown {
  double total = 0.0;      ///< mu_c (1 - mu_c)
  double epistemic = 0.0;  ///< V[Phi(f)]
  double aleatoric = 0.0;  ///< E[Phi(f) (1 - Phi(f))]
};

/// mu_c = E[Phi(f)] = Phi(mu / sqrt(1 + sigma2)).
double class_probability(const MomentPair& m);

UncertaintyBreakdown decompose_variance(const MomentPair& m);

/// V[Phi(f)] = mu_c (1 - mu_c) - 2 T(mu / sqrt(1 + s2), 1 / sqrt(1 + 2 s2)).
double epistemic_variance(const MomentPair& m);

/// E[Phi(f)(1 - Phi(f))] = 2 T(mu / sqrt(1 + s2), 1 / sqrt(1 + 2 s2)).
double aleatoric_variance(const MomentPair& m);

/// Partial derivatives of epistemic_variance w.r.t. mu and sigma2.
struct EpistemicPartials {
  double value = 0.0;
  double d_mu = 0.0;
  double d_sigma2 = 0.0;
};
EpistemicPartials epistemic_variance_partials(const MomentPair& m);

/// Chain rule: d/dx V[Phi(f(x))] given dmu/dx and dsigma2/dx.
Vector epistemic_variance_gradient(const MomentPair& m, const Vector& dmu_dx,
                                   const Vector& dsigma2_dx);

/// Binary entropy in nats.
double binary_entropy(double p);

/// Mutual information I(c, f) in nats, closed-form probit approximation
///   H(mu_c) - ln2 * C / sqrt(s2 + C^2) * exp(-mu^2 / (2 (s2 + C^2))),
/// C^2 = pi ln2 / 2, clipped at zero. Returns 0 when sigma2 is (numerically) 0.
double bald_information_gain(const MomentPair& m);

/// Approximate E[H(Phi(f))] in nats; equals binary_entropy(mu_c) - bald.
double expected_conditional_entropy(const MomentPair& m);

}  // namespace duelopt

#endif  // DUELOPT_UNCERTAINTY_HPP_
