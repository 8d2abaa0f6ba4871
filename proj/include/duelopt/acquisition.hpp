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

#ifndef DUELOPT_ACQUISITION_HPP_
#define DUELOPT_ACQUISITION_HPP_

#include <string>
#include <vector>

#include "duelopt/common.hpp"
#include "duelopt/latent_gp.hpp"
#include "duelopt/optimizer.hpp"
#include "duelopt/random.hpp"
#include "duelopt/sampling.hpp"

namespace duelopt {

enum class RuleKind {
  // binary
  Random,
  UCBPhi,
  UCBLatent,
  BinaryEI,
  ThompsonSampling,
  // preference
  RandomDuel,
  EIBrochu,
  BivariateEI,
  MUC,
  DuelingTS,
  DuelingUCB,
  EIIG,
  DuelTS,
  KSS,
  // batch preference
  BatchRandom,
  BatchMUC,
  BatchKSS,
};

enum class RuleFamily { Binary, Preference, Batch };

struct AcquisitionRule {
  RuleKind kind = RuleKind::Random;
  double beta = 0.0;
  double k = 1.0;
  int batch_size = 3;

  RuleFamily family() const;
  /// CLI spelling, parameters appended only when they differ from defaults,
  /// e.g. "ucb-phi", "ucb-phi:beta=2", "batch-muc:m=4".
  std::string name() const;
  /// name() with ':' and '=' replaced, safe as a directory name.
  std::string file_name() const;

  static AcquisitionRule make(RuleKind kind);
  /// Parses "name[:key=value]...". Throws InvalidArgument listing valid names.
  static AcquisitionRule parse(const std::string& text);
};

/// Every rule name the parser accepts.
std::vector<std::string> rule_names();

struct QueryProposal {
  std::vector<Vector> points;  // 1 (binary), 2 (duel) or m (batch)
  double acquisition_value = 0.0;
  int restarts_used = 0;
  int best_restart = 0;

  Duel duel() const;
};

struct AcquisitionOptions {
  /// Restarts for single-point searches; 0 selects 20 (d <= 2) or 50.
  int restarts = 0;
  /// Restarts for the joint batch challenger search.
  int batch_restarts = 50;
  /// Screening pool size; 0 keeps the optimizer default.
  int pool = 0;

  OptimizerOptions single(Eigen::Index dim) const;
  OptimizerOptions batch(Eigen::Index dim) const;
};

inline constexpr int kGaussHermiteNodes = 64;

// Acquisition surfaces, exposed for diagnostics and tests. Each returns the
// value at x and fills *grad when requested.

/// mu_c(x) + beta sqrt(V[Phi(f(x))]).
SmoothObjective ucb_phi_surface(const LatentPosterior& post, double beta);
/// mu_f(x) + beta sigma_f(x).
SmoothObjective ucb_latent_surface(const LatentPosterior& post, double beta);
/// mu_f(x).
SmoothObjective mean_surface(const LatentPosterior& post);
/// E[max(0, Phi(f(x)) - best)] by Gauss-Hermite quadrature.
SmoothObjective binary_ei_surface(const LatentPosterior& post, double best);
/// V[Phi(g(champion, x))].
SmoothObjective challenger_surface(const LatentPosterior& post, const Vector& champion);
/// E[(f(x) - threshold)_+].
SmoothObjective expected_improvement_surface(const LatentPosterior& post, double threshold);
/// E[(f(x) - f(reference))_+] under the joint posterior.
SmoothObjective bivariate_ei_surface(const LatentPosterior& post, const Vector& reference);
/// k log mu_c(x, champion) - I(c, g(champion, x)).
SmoothObjective eiig_surface(const LatentPosterior& post, const Vector& champion, double k);
/// sum_{i<j} V[Phi(g(x_i, x_j))] over (champion, x_2..x_m), x stacking x_2..x_m.
SmoothObjective batch_challenger_surface(const LatentPosterior& post, const Vector& champion,
                                         int batch_size);

/// argmax mu_f over the box.
OptimizerResult maximize_posterior_mean(const LatentPosterior& post, RandomStream& rng,
                                        const OptimizerOptions& options);

/// Uniform point in the box.
Vector uniform_point(const SearchBox& box, RandomStream& rng);

QueryProposal propose_bbo(const AcquisitionRule& rule, const LatentPosterior& post,
                          const FeatureMap& fm, RandomStream& rng,
                          const AcquisitionOptions& options = {});

QueryProposal propose_duel(const AcquisitionRule& rule, const LatentPosterior& post,
                           const FeatureMap& fm, RandomStream& rng,
                           const AcquisitionOptions& options = {});

/// Kernel self-sparring with explicit streams for the two members.
QueryProposal propose_kss(const LatentPosterior& post, const FeatureMap& fm, RandomStream& first,
                          RandomStream& second, const AcquisitionOptions& options = {});

QueryProposal propose_batch(const AcquisitionRule& rule, const LatentPosterior& post,
                            const FeatureMap& fm, RandomStream& rng, int m,
                            const AcquisitionOptions& options = {});

/// Dispatches on rule.family().
QueryProposal propose(const AcquisitionRule& rule, const LatentPosterior& post,
                      const FeatureMap& fm, RandomStream& rng,
                      const AcquisitionOptions& options = {});

}  // namespace duelopt

#endif  // DUELOPT_ACQUISITION_HPP_
