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

#ifndef DUELOPT_LOCAL_SEARCH_HPP_
#define DUELOPT_LOCAL_SEARCH_HPP_

#include <functional>

#include "duelopt/common.hpp"

namespace duelopt {

/// Objective with optional gradient: fills *grad when grad != nullptr.
using SmoothObjective = std::function<double(const Vector& x, Vector* grad)>;

struct LocalSearchOptions {
  int max_iterations = 200;
  /// Stop when an accepted step moves less than this (unit-cube coordinates).
  double step_tolerance = 1e-10;
  /// Stop when the relative improvement of an accepted step is below this.
  double value_tolerance = 1e-14;
  double initial_step = 0.1;
  /// Central-difference step (unit-cube coordinates) when no gradient.
  double fd_step = 1e-6;
};

struct LocalSearchResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Projected gradient ascent with Armijo backtracking inside [lower, upper].
///
/// The search runs in unit-cube coordinates along the normalized gradient, so
/// the visited points depend only on the direction field and on value
/// comparisons; multiplying the objective by a positive constant leaves the
/// path unchanged. Never returns a point worse than the start.
LocalSearchResult maximize_local(const SmoothObjective& objective, bool has_gradient,
                                 const Vector& start, const Vector& lower,
                                 const Vector& upper, const LocalSearchOptions& options = {});

}  // namespace duelopt

#endif  // DUELOPT_LOCAL_SEARCH_HPP_
