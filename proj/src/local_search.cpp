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

#include "duelopt/local_search.hpp"

#include <cmath>

namespace duelopt {

namespace {

struct UnitCubeProblem {
  const SmoothObjective& objective;
  bool has_gradient;
  const Vector& lower;
  Vector width;
  double fd_step;
  int evaluations = 0;

  Vector to_box(const Vector& u) const { return lower + width.cwiseProduct(u); }

  double value(const Vector& u) {
    ++evaluations;
    return objective(to_box(u), nullptr);
  }

  // Gradient in unit coordinates.
  double value_and_gradient(const Vector& u, Vector& grad) {
    ++evaluations;
    const Vector x = to_box(u);
    if (has_gradient) {
      Vector g(x.size());
      const double f = objective(x, &g);
      grad = g.cwiseProduct(width);
      return f;
    }
    const double f = objective(x, nullptr);
    grad.resize(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (width[i] == 0.0) {
        grad[i] = 0.0;
        continue;
      }
      const double lo = std::max(0.0, u[i] - fd_step);
      const double hi = std::min(1.0, u[i] + fd_step);
      Vector up = u, um = u;
      up[i] = hi;
      um[i] = lo;
      evaluations += 2;
      grad[i] = (objective(to_box(up), nullptr) - objective(to_box(um), nullptr)) / (hi - lo);
    }
    return f;
  }
};

}  // namespace

LocalSearchResult maximize_local(const SmoothObjective& objective, bool has_gradient,
                                 const Vector& start, const Vector& lower,
                                 const Vector& upper, const LocalSearchOptions& options) {
  require(start.size() == lower.size() && lower.size() == upper.size(),
          "maximize_local: dimension mismatch");
  UnitCubeProblem problem{objective, has_gradient, lower, upper - lower, options.fd_step};

  Vector u(start.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u[i] = problem.width[i] > 0.0 ? (start[i] - lower[i]) / problem.width[i] : 0.0;
  }
  u = u.cwiseMax(0.0).cwiseMin(1.0);

  Vector grad;
  double f = problem.value_and_gradient(u, grad);
  LocalSearchResult result{problem.to_box(u), f, 0, 0};
  if (!std::isfinite(f)) {
    result.evaluations = problem.evaluations;
    return result;
  }

  double step = options.initial_step;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    // Drop components that push against an active bound.
    Vector dir = grad;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if ((u[i] <= 0.0 && dir[i] < 0.0) || (u[i] >= 1.0 && dir[i] > 0.0)) dir[i] = 0.0;
    }
    const double norm = dir.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    dir /= norm;

    bool accepted = false;
    Vector u_new;
    double f_new = f;
    for (int bt = 0; bt < 50; ++bt) {
      u_new = (u + step * dir).cwiseMax(0.0).cwiseMin(1.0);
      const double slope = grad.dot(u_new - u);
      f_new = problem.value(u_new);
      if (std::isfinite(f_new) && f_new > f && f_new >= f + 1e-4 * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < options.step_tolerance) break;
    }
    if (!accepted) break;

    const double moved = (u_new - u).norm();
    const double improvement = f_new - f;
    u = u_new;
    f = problem.value_and_gradient(u, grad);
    step = std::min(2.0 * step, 1.0);
    if (moved < options.step_tolerance) break;
    if (improvement <= options.value_tolerance * std::max(std::fabs(f), 1e-300)) break;
  }

  result.x = problem.to_box(u);
  result.value = f;
  result.iterations = it;
  result.evaluations = problem.evaluations;
  return result;
}

}  // namespace duelopt
