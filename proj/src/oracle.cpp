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

#include "duelopt/oracle.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "duelopt/normal.hpp"

namespace duelopt {

std::string format_point(const Vector& x) {
  std::string out = "[";
  char buf[32];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", x[i]);
    if (i > 0) out += ", ";
    out += buf;
  }
  return out + "]";
}

SimulatedOracle::SimulatedOracle(OracleKind kind, const BenchmarkSpec& benchmark, RandomStream rng)
    : kind_(kind), benchmark_(&benchmark), rng_(std::move(rng)) {
  require(kind != OracleKind::Interactive, "SimulatedOracle: kind must be Binary or Preference");
}

int SimulatedOracle::draw_point(const Vector& x) {
  require(kind_ == OracleKind::Binary, "binary draw from a preference oracle");
  const double p = normal_cdf(evaluate_scaled(*benchmark_, x));
  return rng_.bernoulli(p) ? 1 : 0;
}

int SimulatedOracle::draw_duel(const Duel& duel) {
  require(kind_ == OracleKind::Preference, "preference draw from a binary oracle");
  const double p =
      normal_cdf(evaluate_scaled(*benchmark_, duel.first) - evaluate_scaled(*benchmark_, duel.second));
  return rng_.bernoulli(p) ? 1 : 0;
}

InteractiveOracle::InteractiveOracle(std::istream& in, std::ostream& out, int max_malformed)
    : in_(in), out_(out), max_malformed_(max_malformed) {
  require(max_malformed >= 1, "InteractiveOracle: max_malformed must be >= 1");
}

int InteractiveOracle::ask(const std::string& question) {
  ++prompts_;
  out_ << question << std::flush;
  int malformed = 0;
  std::string line;
  while (true) {
    if (!std::getline(in_, line)) {
      throw OracleError("input stream closed while waiting for an answer");
    }
    const auto b = line.find_first_not_of(" \t\r");
    const auto e = line.find_last_not_of(" \t\r");
    const std::string answer = b == std::string::npos ? "" : line.substr(b, e - b + 1);
    if (answer == "0") return 0;
    if (answer == "1") return 1;
    if (++malformed >= max_malformed_) {
      throw OracleError("too many malformed answers (expected \"0\" or \"1\")");
    }
    out_ << "please answer 0 or 1: " << std::flush;
  }
}

int InteractiveOracle::draw_point(const Vector& x) {
  return ask("query " + std::to_string(prompts_ + 1) + ": x = " + format_point(x) +
             "\nsuccess? (1 = yes, 0 = no): ");
}

int InteractiveOracle::draw_duel(const Duel& duel) {
  return ask("duel " + std::to_string(prompts_ + 1) + ": A = " + format_point(duel.first) +
             "  B = " + format_point(duel.second) + "\nprefer A? (1 = A, 0 = B): ");
}

int binary_oracle_draw(Oracle& oracle, const Vector& x) {
  require(oracle.kind() == OracleKind::Binary, "binary_oracle_draw: oracle is not binary");
  return oracle.draw_point(x);
}

int preference_oracle_draw(Oracle& oracle, const Duel& duel) {
  require(oracle.kind() == OracleKind::Preference,
          "preference_oracle_draw: oracle is not a preference oracle");
  return oracle.draw_duel(duel);
}

int interactive_oracle_draw(Oracle& oracle, const Duel& query) {
  require(oracle.kind() == OracleKind::Interactive,
          "interactive_oracle_draw: oracle is not interactive");
  return query.second.size() == 0 ? oracle.draw_point(query.first) : oracle.draw_duel(query);
}

}  // namespace duelopt
