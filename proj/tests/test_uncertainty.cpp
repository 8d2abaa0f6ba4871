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

#include <cmath>

#include <doctest.h>

#include "duelopt/normal.hpp"
#include "duelopt/random.hpp"
#include "duelopt/uncertainty.hpp"
#include "oracles.hpp"

using namespace duelopt;

TEST_CASE("owens t special values") {
  CHECK(owens_t(1.7, 0.0) == 0.0);
  CHECK(owens_t(0.0, 1.0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(std::fabs(owens_t(1.0, 0.5) - oracle::owens_t(1.0, 0.5)) < 1e-10);
  CHECK(std::fabs(owens_t(1.0, 0.5) - 0.0430646911207853) < 1e-13);
}

TEST_CASE("owens t identities on the grid") {
  for (double h = -8.0; h <= 8.0 + 1e-12; h += 0.25) {
    for (double a = -1.0; a <= 1.0 + 1e-12; a += 0.25) {
      const double t = owens_t(h, a);
      CHECK(std::fabs(owens_t(-h, a) - t) < 1e-10);
      CHECK(std::fabs(owens_t(h, -a) + t) < 1e-10);
    }
    CHECK(std::fabs(owens_t(h, 0.0)) < 1e-10);
    const double p = normal_cdf(h);
    CHECK(std::fabs(owens_t(h, 1.0) - 0.5 * p * (1.0 - p)) < 1e-10);
  }
  for (double a = -1.0; a <= 1.0 + 1e-12; a += 0.25) {
    CHECK(std::fabs(owens_t(0.0, a) - std::atan(a) / (2.0 * oracle::kPi)) < 1e-10);
  }
}

TEST_CASE("owens t matches quadrature at random points including |a| > 1") {
  RandomStream rng(17);
  for (int i = 0; i < 60; ++i) {
    const double h = rng.uniform(-6.0, 6.0), a = rng.uniform(-4.0, 4.0);
    CHECK(std::fabs(owens_t(h, a) - oracle::owens_t(h, a, 400000)) < 1e-10);
  }
}

TEST_CASE("owens t partial derivatives") {
  RandomStream rng(19);
  for (int i = 0; i < 50; ++i) {
    const double h = rng.uniform(-4.0, 4.0), a = rng.uniform(-2.0, 2.0), e = 1e-6;
    const double dh = (owens_t(h + e, a) - owens_t(h - e, a)) / (2 * e);
    const double da = (owens_t(h, a + e) - owens_t(h, a - e)) / (2 * e);
    // Central differences carry about 1e-10 of round-off.
    CHECK(std::fabs(owens_t_dh(h, a) - dh) < 1e-6 * std::fabs(dh) + 1e-9);
    CHECK(std::fabs(owens_t_da(h, a) - da) < 1e-6 * std::fabs(da) + 1e-9);
  }
}

TEST_CASE("decomposition examples") {
  CHECK(epistemic_variance({0.7, 0.0}) == doctest::Approx(0.0).scale(1e-12));
  CHECK(epistemic_variance({0.0, 1.0}) == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  CHECK(aleatoric_variance({0.0, 0.0}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(aleatoric_variance({0.0, 1.0}) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  const double p5 = oracle::phi_cdf(5.0);
  CHECK(aleatoric_variance({5.0, 0.0}) == doctest::Approx(p5 * (1 - p5)).epsilon(1e-8));
  // At sigma2 = 1e8 the closed form is 1/4 - atan(1/sqrt(2e8 + 1))/pi; the
  // 1/4 limit is only reached to 1e-6 for sigma2 of order 1e12.
  const double closed = 0.25 - std::atan(1.0 / std::sqrt(2e8 + 1.0)) / oracle::kPi;
  CHECK(std::fabs(epistemic_variance({0.0, 1e8}) - closed) < 1e-12);
  CHECK(std::fabs(epistemic_variance({0.0, 1e12}) - 0.25) < 1e-6);
  CHECK(class_probability({0.0, 3.0}) == doctest::Approx(0.5));
  CHECK(class_probability({1.0, 0.0}) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
}

TEST_CASE("epistemic variance matches monte carlo at (0, 1)") {
  RandomStream rng(23);
  const int n = 1000000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = oracle::phi_cdf(rng.normal());
    s1 += p;
    s2 += p * p;
  }
  const double var = s2 / n - (s1 / n) * (s1 / n);
  CHECK(std::fabs(var - epistemic_variance({0.0, 1.0})) < 1e-3);
}

TEST_CASE("decomposition identity, quadrature agreement and monotonicity") {
  const double sig[] = {1e-6, 0.01, 0.1, 1.0, 10.0, 100.0};
  for (double mu = -5.0; mu <= 5.0 + 1e-12; mu += 0.25) {
    double prev_epi = -1.0;
    for (double s2 : sig) {
      const UncertaintyBreakdown u = decompose_variance({mu, s2});
      const double mc = class_probability({mu, s2});
      CHECK(std::fabs(u.epistemic + u.aleatoric - mc * (1 - mc)) < 1e-10);
      CHECK(std::fabs(u.total - mc * (1 - mc)) < 1e-12);
      CHECK(std::fabs(u.epistemic - oracle::epistemic_variance(mu, s2)) < 1e-7);
      CHECK(u.epistemic >= prev_epi - 1e-15);
      CHECK(std::fabs(epistemic_variance({-mu, s2}) - u.epistemic) < 1e-12);
      CHECK(std::fabs(aleatoric_variance({-mu, s2}) - u.aleatoric) < 1e-12);
      CHECK(bald_information_gain({mu, s2}) >= 0.0);
      prev_epi = u.epistemic;
    }
  }
}

TEST_CASE("class probability matches quadrature") {
  for (double mu = -3.0; mu <= 3.0; mu += 0.5) {
    for (double s2 : {0.01, 0.5, 1.0, 4.0}) {
      const double ref = oracle::gaussian_expectation(oracle::phi_cdf, mu, s2, 100);
      CHECK(std::fabs(class_probability({mu, s2}) - ref) < 1e-8);
    }
  }
}

TEST_CASE("epistemic gradient matches central differences") {
  RandomStream rng(29);
  for (int t = 0; t < 200; ++t) {
    const double mu = rng.uniform(-3.0, 3.0), s2 = rng.uniform(0.05, 5.0);
    Vector dmu(3), ds2(3);
    for (int i = 0; i < 3; ++i) {
      dmu[i] = rng.normal();
      ds2[i] = rng.normal();
    }
    const Vector g = epistemic_variance_gradient({mu, s2}, dmu, ds2);
    const double e = 1e-5;
    for (int i = 0; i < 3; ++i) {
      const double fd = (epistemic_variance({mu + e * dmu[i], s2 + e * ds2[i]}) -
                         epistemic_variance({mu - e * dmu[i], s2 - e * ds2[i]})) / (2 * e);
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-9));
    }
  }
  const Vector zero = Vector::Zero(2);
  CHECK(epistemic_variance_gradient({0.4, 1.0}, zero, zero).norm() == 0.0);
  Vector dmu(2);
  dmu << 1.0, -2.0;
  CHECK(epistemic_variance_gradient({0.0, 1.0}, dmu, zero).norm() < 1e-12);
}

TEST_CASE("bald information gain") {
  CHECK(bald_information_gain({0.3, 0.0}) == 0.0);
  // Quadrature reference in nats: H(mu_c) - E[H(Phi(f))].
  auto h = [](double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1 - p) * std::log(1 - p);
  };
  const double mc = class_probability({0.0, 1.0});
  const double cond = oracle::gaussian_expectation([&](double f) { return h(oracle::phi_cdf(f)); },
                                                   0.0, 1.0, 100);
  CHECK(std::fabs(bald_information_gain({0.0, 1.0}) - (h(mc) - cond)) < 5e-3);
  CHECK(bald_information_gain({0.0, 4.0}) > bald_information_gain({0.0, 1.0}));
  CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
  CHECK(std::fabs(bald_information_gain({0.0, 1.0}) -
                  (binary_entropy(mc) - expected_conditional_entropy({0.0, 1.0}))) < 1e-12);
}
