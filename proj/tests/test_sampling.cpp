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
#include <memory>

#include <doctest.h>

#include "duelopt/sampling.hpp"

using namespace duelopt;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

KernelConfig se(double ls = 0.2) { return KernelConfig::isotropic(KernelFamily::SquaredExponentialARD, 1, ls); }

ObservationDataset three_points() {
  ObservationDataset ds(ObservationMode::Binary, SearchBox(v1(0.0), v1(1.0)), se());
  ds.add_binary(v1(0.2), 1);
  ds.add_binary(v1(0.5), 0);
  ds.add_binary(v1(0.55), 1);
  return ds;
}

}  // namespace

TEST_CASE("feature map approximates the kernel") {
  const SearchBox box(v1(-1.0), v1(1.0));
  for (auto family : {KernelFamily::SquaredExponentialARD, KernelFamily::Matern52}) {
    const KernelConfig k = KernelConfig::isotropic(family, 1, 0.2);
    const FeatureMap fm = build_feature_map(box, k, 256);
    REQUIRE(fm.size() == 256);
    double sup = 0.0, diag = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Vector x = v1(-1.0 + 2.0 * i / 49.0);
      const Vector px = fm.features(x);
      diag = std::max(diag, px.squaredNorm());
      for (int j = 0; j < 50; ++j) {
        const Vector y = v1(-1.0 + 2.0 * j / 49.0);
        sup = std::max(sup, std::fabs(px.dot(fm.features(y)) - kernel_eval(k, x, y)));
      }
    }
    // Matern spectra decay slowly, so only the SE bound is tight.
    if (family == KernelFamily::SquaredExponentialARD) {
      CHECK(sup < 1e-3);
    } else {
      CHECK(sup < 5e-2);
    }
    CHECK(diag <= 1.0 + 1e-2);
  }
  const SearchBox sq(Vector::Zero(2), Vector::Ones(2));
  FeatureMapOptions opt;
  opt.per_dim_counts = {16, 16};
  const FeatureMap two(sq, KernelConfig::isotropic(KernelFamily::SquaredExponentialARD, 2, 0.3), opt);
  CHECK(two.size() == 256);
  CHECK((two.spectral_weights().array() >= 0.0).all());
}

TEST_CASE("feature gradients match finite differences") {
  const SearchBox sq(Vector::Zero(2), Vector::Ones(2));
  const FeatureMap fm = build_feature_map(sq, KernelConfig::isotropic(KernelFamily::Matern32, 2, 0.3), 8);
  Vector x(2);
  x << 0.31, 0.72;
  Matrix jac;
  const Vector f = fm.features_with_gradient(x, jac);
  CHECK((f - fm.features(x)).norm() < 1e-14);
  for (int d = 0; d < 2; ++d) {
    Vector a = x, b = x;
    a[d] += 1e-6;
    b[d] -= 1e-6;
    const Vector fd = (fm.features(a) - fm.features(b)) / 2e-6;
    CHECK((fd - jac.row(d).transpose()).norm() < 1e-5 * (1.0 + fd.norm()));
  }
}

TEST_CASE("preference features") {
  const FeatureMap fm = build_feature_map(SearchBox(v1(-1.0), v1(1.0)), se(), 256);
  RandomStream rng(3);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Duel a{v1(rng.uniform(-1, 1)), v1(rng.uniform(-1, 1))}, b{v1(rng.uniform(-1, 1)), v1(rng.uniform(-1, 1))};
    const Vector pa = preference_features(fm, a);
    CHECK((pa + preference_features(fm, a.swapped())).norm() == 0.0);
    worst = std::max(worst, std::fabs(pa.dot(preference_features(fm, b)) - preference_kernel_eval(se(), a, b)));
  }
  CHECK(worst < 5e-3);
  CHECK(preference_features(fm, Duel{v1(0.3), v1(0.3)}).norm() == 0.0);
}

TEST_CASE("decoupled samples match the posterior moments") {
  const LatentPosterior post = LatentPosterior::fit(three_points());
  auto fm = std::make_shared<const FeatureMap>(build_feature_map(post.dataset().box(), se(), 256));
  const DecoupledSampler sampler(post, fm);
  RandomStream rng(7);
  const int n = 10000;
  const std::vector<double> probes{0.05, 0.3, 0.5, 0.7, 0.95};
  Matrix vals(n, 5);
  for (int s = 0; s < n; ++s) {
    const PathSample path = sampler.draw(rng);
    for (int p = 0; p < 5; ++p) vals(s, p) = path.value(v1(probes[p]));
  }
  const Vector mean = vals.colwise().mean();
  const Matrix centered = vals.rowwise() - mean.transpose();
  const Matrix cov = centered.transpose() * centered / (n - 1);
  for (int i = 0; i < 5; ++i) {
    const LatentPrediction pi = predict_latent(post, v1(probes[i]));
    CHECK(std::fabs(mean[i] - pi.mean) < 3.0 * std::sqrt(pi.variance / n));
    for (int j = i; j < 5; ++j) {
      const double vj = predict_latent(post, v1(probes[j])).variance;
      const double c = predict_latent_cov(post, v1(probes[i]), v1(probes[j]));
      CHECK(std::fabs(cov(i, j) - c) < 3.0 * std::sqrt((pi.variance * vj + c * c) / n));
    }
  }
}

TEST_CASE("decoupled samples interpolate and stay antisymmetric") {
  RandomStream rng(11);
  ObservationDataset ds(ObservationMode::Preference, SearchBox(v1(0.0), v1(1.0)), se());
  for (int i = 0; i < 6; ++i) ds.add_duel({v1(rng.uniform()), v1(rng.uniform())}, rng.bernoulli(0.5));
  const LatentPosterior post = LatentPosterior::fit(ds);
  auto fm = std::make_shared<const FeatureMap>(build_feature_map(ds.box(), se(), 256));
  const PathSample path = DecoupledSampler(post, fm).draw(rng);
  for (int t = 0; t < 100; ++t) {
    const Duel d{v1(rng.uniform()), v1(rng.uniform())};
    CHECK(std::fabs(path.duel_value(d) + path.duel_value(d.swapped())) < 1e-9);
  }
  CHECK(std::fabs(path.value(v1(0.4)) - path.value(v1(0.4 + 1e-6))) < 1e-3);

  RandomStream a(5), b(5);
  const PathSample pa = sample_decoupled(post, *fm, a), pb = sample_decoupled(post, *fm, b);
  CHECK(pa.value(v1(0.37)) == pb.value(v1(0.37)));
}

TEST_CASE("far from data decoupled samples keep the prior variance") {
  ObservationDataset ds(ObservationMode::Binary, SearchBox(v1(0.0), v1(4.0)), se());
  for (int i = 0; i < 8; ++i) ds.add_binary(v1(0.05 * i), i % 2);
  const LatentPosterior post = LatentPosterior::fit(ds);
  const FeatureMap fm = build_feature_map(ds.box(), se(), 256);
  RandomStream rng(13);
  double s = 0.0, s2 = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double v = sample_decoupled(post, fm, rng).value(v1(3.5));
    s += v;
    s2 += v * v;
  }
  const double var = s2 / n - (s / n) * (s / n);
  CHECK(std::fabs(var - 1.0) < 0.2);
}

TEST_CASE("weight-space sampling") {
  const SearchBox box(v1(0.0), v1(1.0));
  SUBCASE("prior variance") {
    const ObservationDataset empty(ObservationMode::Binary, box, se());
    const LatentPosterior post = LatentPosterior::fit(empty);
    const FeatureMap fm = build_feature_map(box, se(), 256);
    RandomStream rng(17);
    double s = 0.0, s2 = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double v = sample_weight_space(post, fm, rng).value(v1(0.4));
      s += v;
      s2 += v * v;
    }
    const double var = s2 / n - (s / n) * (s / n);
    // var of a sample variance is about 2 sigma^4 / n.
    CHECK(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
  }
  SUBCASE("mean at training points") {
    RandomStream data(19);
    ObservationDataset ds(ObservationMode::Binary, box, se());
    for (int i = 0; i < 5; ++i) ds.add_binary(v1(0.1 + 0.2 * i), data.bernoulli(0.5));
    const LatentPosterior post = LatentPosterior::fit(ds);
    const FeatureMap fm = build_feature_map(box, se(), 256);
    RandomStream rng(23);
    const int n = 10000;
    Vector sum = Vector::Zero(5);
    for (int s = 0; s < n; ++s) {
      const PathSample p = sample_weight_space(post, fm, rng);
      for (int i = 0; i < 5; ++i) sum[i] += p.value(v1(0.1 + 0.2 * i));
    }
    for (int i = 0; i < 5; ++i) {
      const LatentPrediction pr = predict_latent(post, v1(0.1 + 0.2 * i));
      CHECK(std::fabs(sum[i] / n - pr.mean) < 3.0 * std::sqrt(pr.variance / n) + 1e-3);
    }
  }
  SUBCASE("starvation flag") {
    ObservationDataset ds(ObservationMode::Binary, box, se());
    for (int i = 0; i < 12; ++i) ds.add_binary(v1(i / 11.0), i % 2);
    const LatentPosterior post = LatentPosterior::fit(ds);
    auto small = std::make_shared<const FeatureMap>(build_feature_map(box, se(), 8));
    auto large = std::make_shared<const FeatureMap>(build_feature_map(box, se(), 256));
    CHECK(WeightSpaceSampler(post, small).variance_starvation());
    CHECK_FALSE(WeightSpaceSampler(post, large).variance_starvation());
  }
}

TEST_CASE("sample maximizer") {
  const SearchBox box(v1(0.0), v1(1.0));
  const double peak = 0.62;
  ObservationDataset ds(ObservationMode::Binary, box, se());
  for (int i = 0; i < 30; ++i) ds.add_binary(v1(peak), 1);
  for (int i = 0; i < 20; ++i) ds.add_binary(v1(i / 19.0), 0);
  const LatentPosterior post = LatentPosterior::fit(ds);
  const FeatureMap fm = build_feature_map(box, se(), 256);
  RandomStream rng(29);
  const OptimizerOptions opts = default_optimizer_options(1);
  int close = 0;
  for (int t = 0; t < 50; ++t) {
    const Vector x = sample_maximizer(post, fm, rng, opts);
    CHECK(box.contains(x));
    // Probit data caps how sharp the peak can get; half a lengthscale.
    if (std::fabs(x[0] - peak) < 0.5 * 0.2) ++close;
  }
  CHECK(close >= 45);

  // Empty 2-D posterior: maximizers spread over the quadrants.
  const SearchBox sq(Vector::Zero(2), Vector::Ones(2));
  const KernelConfig k2 = KernelConfig::isotropic(KernelFamily::SquaredExponentialARD, 2, 0.2);
  const LatentPosterior prior = LatentPosterior::fit(ObservationDataset(ObservationMode::Binary, sq, k2));
  const FeatureMap fm2 = build_feature_map(sq, k2, 16);
  int quadrant[4] = {0, 0, 0, 0};
  RandomStream r2(31);
  for (int t = 0; t < 200; ++t) {
    const Vector x = sample_maximizer(prior, fm2, r2, default_optimizer_options(2));
    ++quadrant[(x[0] > 0.5) + 2 * (x[1] > 0.5)];
  }
  for (int q : quadrant) CHECK(q <= 120);
}
