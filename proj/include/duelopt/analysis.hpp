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

#ifndef DUELOPT_ANALYSIS_HPP_
#define DUELOPT_ANALYSIS_HPP_

#include <string>
#include <vector>

#include "duelopt/common.hpp"
#include "duelopt/experiments.hpp"

namespace duelopt {

inline constexpr double kDefaultAlpha = 5e-4;

struct MannWhitneyResult {
  double u = 0.0;  // pairs (a_i, b_j) with a_i > b_j, ties counted as 1/2
  double p = 1.0;  // one-sided, alternative: a stochastically greater than b
  bool exact = false;
  bool degenerate = false;  // every value identical; p forced to 1
};

// Exact null distribution when |a|*|b| <= exact_limit, normal approximation
// with tie and continuity correction otherwise.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                                 int exact_limit = 400);

// Trapezoid over iteration index of the objective-at-x_star trace.
double area_under_curve(const std::vector<double>& trace);
double area_under_curve(const TrialRecord& record);

struct RuleSamples {
  std::string rule;
  std::vector<double> best;
  std::vector<double> auc;
};

struct BenchmarkRanking {
  std::string benchmark;
  std::vector<std::string> rules;
  std::vector<std::vector<int>> wins;        // wins[i][j] = 1 iff i beats j on best values
  std::vector<std::vector<double>> p_values;  // one-sided p for i > j on best values
  std::vector<int> win_counts;
  std::vector<int> tie_break_wins;  // AUC wins inside the rule's win-count group
  std::vector<int> rank;            // 1 = best; equal keys share a rank
  std::vector<int> borda;
};

BenchmarkRanking rank_benchmark(const std::string& benchmark, const std::vector<RuleSamples>& rules,
                                double alpha = kDefaultAlpha);

struct RankingReport {
  double alpha = kDefaultAlpha;
  std::vector<BenchmarkRanking> benchmarks;
  std::vector<std::string> rules;
  std::vector<int> borda;  // summed over benchmarks
  std::vector<int> rank;   // competition ranking on the sums
  // Fraction of benchmarks on which rule i beats rule j.
  std::vector<std::vector<double>> win_fraction;
};

// Throws InvalidArgument when the benchmarks do not share one rule set.
RankingReport aggregate(const std::vector<BenchmarkRanking>& benchmarks, double alpha);

// Reads every complete rep*.jsonl under dir/<benchmark>/<rule>/.
struct ResultSet {
  std::vector<std::string> benchmarks;
  std::vector<std::vector<RuleSamples>> samples;  // parallel to benchmarks
  int trials = 0;
};
ResultSet load_results(const std::string& dir);

RankingReport analyze_results(const ResultSet& results, double alpha = kDefaultAlpha);

std::string report_json(const RankingReport& report);
std::string report_csv(const RankingReport& report);
std::string win_matrix_csv(const BenchmarkRanking& ranking);
std::string win_fraction_csv(const RankingReport& report);
// Aligned text table: rank, rule, Borda.
std::string report_table(const RankingReport& report);

// ranking.json, ranking.csv, win_fraction.csv and winmatrix_<benchmark>.csv.
std::vector<std::string> write_report(const RankingReport& report, const std::string& dir);

}  // namespace duelopt

#endif  // DUELOPT_ANALYSIS_HPP_
