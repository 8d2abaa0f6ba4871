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
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "duelopt/analysis.hpp"
#include "duelopt/random.hpp"
#include "oracles.hpp"

using namespace duelopt;
namespace fs = std::filesystem;

namespace {

std::vector<double> shifted(RandomStream& rng, int n, double shift) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal() + shift;
  return v;
}

std::vector<double> block(int n, double start) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = start + i;
  return v;
}

}  // namespace

TEST_CASE("mann-whitney examples") {
  const MannWhitneyResult r = mann_whitney_u({3, 4, 5}, {0, 1, 2});
  CHECK(r.u == 9.0);
  CHECK(r.exact);
  CHECK(std::fabs(r.p - 0.05) < 1e-15);
  CHECK(mann_whitney_u({1, 2, 3}, {1, 2, 3}).p >= 0.5);
  const MannWhitneyResult flat = mann_whitney_u({2, 2}, {2, 2, 2});
  CHECK(flat.degenerate);
  CHECK(flat.p == 1.0);
  CHECK_THROWS_AS(mann_whitney_u({}, {1.0}), InvalidArgument);
}

TEST_CASE("exact p matches enumeration for every n*m <= 100") {
  RandomStream rng(3);
  double worst = 0.0;
  for (int n = 1; n <= 100; ++n) {
    for (int m = 1; n * m <= 100; ++m) {
      // Small integer support so that ties occur.
      std::vector<double> a(n), b(m);
      for (auto& x : a) x = static_cast<double>(rng.below(6));
      for (auto& x : b) x = static_cast<double>(rng.below(6));
      const MannWhitneyResult r = mann_whitney_u(a, b);
      if (r.degenerate) continue;
      const auto [u, p] = oracle::mann_whitney_enumerate(a, b);
      CHECK(r.u == u);
      worst = std::max(worst, std::fabs(r.p - p));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("normal approximation tracks the exact p") {
  RandomStream rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto a = shifted(rng, 30, 0.3 * t / 10.0), b = shifted(rng, 30, 0.0);
    const MannWhitneyResult exact = mann_whitney_u(a, b, 1000), approx = mann_whitney_u(a, b);
    CHECK(exact.exact);
    CHECK_FALSE(approx.exact);
    CHECK(std::fabs(exact.p - approx.p) < 0.01);
  }
}

TEST_CASE("area under curve") {
  CHECK(area_under_curve(std::vector<double>{2.5, 2.5, 2.5, 2.5}) == doctest::Approx(7.5));
  CHECK(area_under_curve(std::vector<double>{4.0}) == 0.0);
  CHECK(area_under_curve(std::vector<double>{0.0, 1.0, 2.0}) == 2.0);
}

TEST_CASE("separated rules score 2, 1, 0") {
  std::vector<RuleSamples> rules{{"low", block(20, 0), block(20, 0)},
                                 {"high", block(20, 200), block(20, 0)},
                                 {"mid", block(20, 100), block(20, 0)}};
  const BenchmarkRanking r = rank_benchmark("fixture", rules);
  CHECK(r.borda == std::vector<int>{0, 2, 1});
  CHECK(r.rank == std::vector<int>{3, 1, 2});
  CHECK(r.wins[1][0] == 1);
  CHECK(r.wins[0][1] == 0);

  const std::vector<RuleSamples> same{{"a", block(5, 0), block(5, 0)}, {"b", block(5, 0), block(5, 0)}};
  CHECK(rank_benchmark("same", same).borda == std::vector<int>{0, 0});
  CHECK_THROWS_AS(rank_benchmark("one", {rules[0]}), InvalidArgument);
}

TEST_CASE("auc breaks ties between equal win counts") {
  std::vector<RuleSamples> rules{{"slow", block(20, 0), block(20, 0)},
                                 {"fast", block(20, 0), block(20, 100)}};
  const BenchmarkRanking r = rank_benchmark("tie", rules);
  CHECK(r.win_counts == std::vector<int>{0, 0});
  CHECK(r.borda == std::vector<int>{0, 1});
}

TEST_CASE("aggregation") {
  auto fixture = [](bool reversed) {
    std::vector<RuleSamples> rules{{"a", block(20, reversed ? 0 : 200), block(20, 0)},
                                   {"b", block(20, 100), block(20, 0)},
                                   {"c", block(20, reversed ? 200 : 0), block(20, 0)}};
    return rank_benchmark(reversed ? "rev" : "fwd", rules);
  };
  const RankingReport single = aggregate({fixture(false)}, kDefaultAlpha);
  CHECK(single.borda == std::vector<int>{2, 1, 0});
  const RankingReport three = aggregate({fixture(false), fixture(false), fixture(true)}, kDefaultAlpha);
  CHECK(three.borda == std::vector<int>{4, 3, 2});
  CHECK(three.rank == std::vector<int>{1, 2, 3});
  CHECK(three.win_fraction[0][2] == doctest::Approx(2.0 / 3.0));

  const std::vector<RuleSamples> up{{"x", block(20, 100), block(20, 0)}, {"y", block(20, 0), block(20, 0)}};
  const std::vector<RuleSamples> down{{"x", block(20, 0), block(20, 0)}, {"y", block(20, 100), block(20, 0)}};
  const RankingReport opposite = aggregate({rank_benchmark("u", up), rank_benchmark("d", down)}, kDefaultAlpha);
  CHECK(opposite.borda == std::vector<int>{1, 1});
  CHECK(opposite.rank == std::vector<int>{1, 1});

  const std::vector<RuleSamples> other{{"x", block(5, 0), block(5, 0)}, {"z", block(5, 0), block(5, 0)}};
  CHECK_THROWS_AS(aggregate({rank_benchmark("u", up), rank_benchmark("o", other)}, kDefaultAlpha),
                  InvalidArgument);
}

TEST_CASE("win matrix is invariant under monotone transforms") {
  RandomStream rng(7);
  for (int t = 0; t < 20; ++t) {
    std::vector<RuleSamples> rules;
    for (int r = 0; r < 4; ++r) {
      rules.push_back({"r" + std::to_string(r), shifted(rng, 15, 0.8 * r), shifted(rng, 15, 0.0)});
    }
    std::vector<RuleSamples> mapped = rules;
    for (auto& rs : mapped) {
      for (auto& v : rs.best) v = std::exp(3.0 * v) + std::atan(v);
    }
    const double alpha = 0.05;
    const BenchmarkRanking a = rank_benchmark("b", rules, alpha), b = rank_benchmark("b", mapped, alpha);
    CHECK(a.wins == b.wins);
    for (std::size_t i = 0; i < a.wins.size(); ++i) {
      for (std::size_t j = 0; j < a.wins.size(); ++j) CHECK(!(a.wins[i][j] && a.wins[j][i]));
      CHECK(a.borda[i] >= 0);
      CHECK(a.borda[i] <= 3);
    }
  }
}

TEST_CASE("results directory loading and report files") {
  const fs::path dir = fs::temp_directory_path() / ("duelopt_analysis_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  for (const char* rule : {"good", "bad"}) {
    fs::create_directories(dir / "bench" / rule);
    for (int k = 0; k < 6; ++k) {
      TrialRecord rec;
      rec.benchmark = "bench";
      rec.rule = rule;
      rec.repetition = k;
      rec.seed = k;
      for (int it = 1; it <= 3; ++it) {
        TrialRow row;
        row.iteration = it;
        row.query = {Vector::Constant(1, 0.5)};
        row.outcomes = {1};
        row.x_star = Vector::Constant(1, 0.5);
        row.value_at_x_star = (std::string(rule) == "good" ? 10.0 : 0.0) + k + it;
        rec.rows.push_back(row);
      }
      std::ofstream out(dir / "bench" / rule / ("rep" + std::to_string(k) + ".jsonl"));
      write_trial_jsonl(rec, out);
    }
  }
  std::ofstream(dir / "bench" / "bad" / "rep6.aborted.jsonl") << "{\"aborted\":true}\n";

  const ResultSet rs = load_results(dir.string());
  CHECK(rs.trials == 12);
  REQUIRE(rs.benchmarks == std::vector<std::string>{"bench"});
  const RankingReport report = analyze_results(rs, 0.05);
  const auto good = std::find(report.rules.begin(), report.rules.end(), "good") - report.rules.begin();
  CHECK(report.borda[good] == 1);
  CHECK(report.rank[good] == 1);

  const fs::path out = dir / "report";
  write_report(report, out.string());
  CHECK(fs::exists(out / "ranking.json"));
  CHECK(fs::exists(out / "ranking.csv"));
  CHECK(fs::exists(out / "winmatrix_bench.csv"));
  const auto j = nlohmann::json::parse(report_json(report));
  CHECK(j.at("alpha").get<double>() == 0.05);
  CHECK(report_csv(report).rfind("rank,rule,borda\n", 0) == 0);

  CHECK_THROWS_AS(load_results((dir / "missing").string()), IoError);
  fs::remove_all(dir);
}
