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

#ifndef DUELOPT_OPTIMIZER_HPP_
#define DUELOPT_OPTIMIZER_HPP_

#include <cstdint>

#include "duelopt/common.hpp"
#include "duelopt/kernels.hpp"
#include "duelopt/local_search.hpp"
#include "duelopt/random.hpp"

namespace duelopt {

struct OptimizerOptions {
  /// Local ascents started from the best points of the screening pool.
  int restarts = 20;
  /// Size of the shifted Sobol screening pool (at least `restarts`).
  int pool = 128;
  LocalSearchOptions local;
};

/// Restart counts used by the acquisition rules: 20 for d <= 2, 50 above.
OptimizerOptions default_optimizer_options(Eigen::Index dim);

struct OptimizerResult {
  Vector x;
  double value = 0.0;
  int restarts_used = 0;
  int best_restart = 0;
};

/// Multi-start maximization over a box.
///
/// A Sobol pool with a random Cranley-Patterson shift is scored, the best
/// `restarts` points (ties by pool index) seed projected-gradient ascents and
/// the best result wins, ties going to the lowest restart index. Throws
/// NumericalError when the objective is non-finite at every start.
OptimizerResult optimize_inner(const SmoothObjective& objective, bool has_gradient,
                               const SearchBox& box, RandomStream& rng,
                               const OptimizerOptions& options = {});

/// The p-fold product box^p, points stacked as [x_1; ...; x_p].
SearchBox product_box(const SearchBox& box, int copies);

/// Shifted Sobol points in [0,1)^dim, one per column.
Matrix sobol_points(Eigen::Index dim, Eigen::Index count, const Vector& shift);

}  // namespace duelopt

#endif  // DUELOPT_OPTIMIZER_HPP_
