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

#include "duelopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/random/sobol.hpp>

namespace duelopt {

OptimizerOptions default_optimizer_options(Eigen::Index dim) {
  OptimizerOptions o;
  o.restarts = dim <= 2 ? 20 : 50;
  o.pool = std::max(o.restarts, dim <= 2 ? 128 : 256);
  return o;
}

SearchBox product_box(const SearchBox& box, int copies) {
  require(copies >= 1, "product_box: copies must be >= 1");
  const Eigen::Index d = box.dim();
  Vector lo(d * copies), hi(d * copies);
  for (int c = 0; c < copies; ++c) {
    lo.segment(c * d, d) = box.lower();
    hi.segment(c * d, d) = box.upper();
  }
  return SearchBox(lo, hi);
}

Matrix sobol_points(Eigen::Index dim, Eigen::Index count, const Vector& shift) {
  require(shift.size() == dim, "sobol_points: shift dimension mismatch");
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  const double scale = 1.0 / (static_cast<double>(boost::random::sobol::max()) + 1.0);
  Matrix out(dim, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      double u = static_cast<double>(engine()) * scale + shift[i];
      out(i, j) = u - std::floor(u);
    }
  }
  return out;
}

OptimizerResult optimize_inner(const SmoothObjective& objective, bool has_gradient,
                               const SearchBox& box, RandomStream& rng,
                               const OptimizerOptions& options) {
  require(options.restarts >= 1, "optimize_inner: restarts must be >= 1");
  const Eigen::Index dim = box.dim();
  const int pool_size = std::max(options.pool, options.restarts);

  Vector shift(dim);
  for (Eigen::Index i = 0; i < dim; ++i) shift[i] = rng.uniform();
  const Matrix unit = sobol_points(dim, pool_size, shift);

  std::vector<Vector> pool(static_cast<std::size_t>(pool_size));
  std::vector<double> scores(static_cast<std::size_t>(pool_size));
  for (int j = 0; j < pool_size; ++j) {
    pool[j] = box.from_unit(unit.col(j));
    const double v = objective(pool[j], nullptr);
    scores[j] = std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  }
  std::vector<int> order(static_cast<std::size_t>(pool_size));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });

  OptimizerResult best;
  best.value = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (int r = 0; r < options.restarts; ++r) {
    const Vector& start = pool[order[r]];
    if (!std::isfinite(scores[order[r]])) continue;
    const LocalSearchResult ls = maximize_local(objective, has_gradient, start, box.lower(),
                                                box.upper(), options.local);
    ++best.restarts_used;
    if (std::isfinite(ls.value) && (!found || ls.value > best.value)) {
      best.x = box.clamp(ls.x);
      best.value = ls.value;
      best.best_restart = r;
      found = true;
    }
  }
  if (!found) throw NumericalError("optimize_inner: objective non-finite at every restart");
  return best;
}

}  // namespace duelopt
