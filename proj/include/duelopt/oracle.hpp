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

#ifndef DUELOPT_ORACLE_HPP_
#define DUELOPT_ORACLE_HPP_

#include <iosfwd>

#include "duelopt/benchmarks.hpp"
#include "duelopt/common.hpp"
#include "duelopt/kernels.hpp"
#include "duelopt/random.hpp"

namespace duelopt {

enum class OracleKind { Binary, Preference, Interactive };

/// Source of binary feedback. One trial owns one oracle.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual OracleKind kind() const = 0;
  /// c ~ Bernoulli(Phi(f(x))).
  virtual int draw_point(const Vector& x) = 0;
  /// c = 1 when duel.first wins; P = Phi(f(first) - f(second)).
  virtual int draw_duel(const Duel& duel) = 0;
};

/// Simulated feedback through the probit link on the scaled benchmark. Each
/// draw consumes exactly one uniform from the private stream.
class SimulatedOracle : public Oracle {
 public:
  SimulatedOracle(OracleKind kind, const BenchmarkSpec& benchmark, RandomStream rng);
  OracleKind kind() const override { return kind_; }
  int draw_point(const Vector& x) override;
  int draw_duel(const Duel& duel) override;

 private:
  OracleKind kind_;
  const BenchmarkSpec* benchmark_;
  RandomStream rng_;
};

/// Asks a person on a line-oriented stream. Points are printed with 6
/// significant digits; only "0" or "1" lines are accepted, with up to
/// `max_malformed - 1` re-prompts. Throws OracleError when the stream closes
/// or the malformed limit is reached.
class InteractiveOracle : public Oracle {
 public:
  InteractiveOracle(std::istream& in, std::ostream& out, int max_malformed = 3);
  OracleKind kind() const override { return OracleKind::Interactive; }
  int draw_point(const Vector& x) override;
  int draw_duel(const Duel& duel) override;
  int prompts() const { return prompts_; }

 private:
  int ask(const std::string& question);

  std::istream& in_;
  std::ostream& out_;
  int max_malformed_;
  int prompts_ = 0;
};

int binary_oracle_draw(Oracle& oracle, const Vector& x);
int preference_oracle_draw(Oracle& oracle, const Duel& duel);
/// Point query when `duel.second` is empty, duel query otherwise.
int interactive_oracle_draw(Oracle& oracle, const Duel& query);

/// "[a, b, c]" with 6 significant digits.
std::string format_point(const Vector& x);

}  // namespace duelopt

#endif  // DUELOPT_ORACLE_HPP_
