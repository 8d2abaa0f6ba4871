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

#include "duelopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "duelopt/normal.hpp"

namespace duelopt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Doubled midranks of the pooled sample (integers), a first then b.
std::vector<long> doubled_midranks(const std::vector<double>& a, const std::vector<double>& b,
                                   std::vector<long>* tie_sizes) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<long> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const long r2 = static_cast<long>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r2;
    if (tie_sizes) tie_sizes->push_back(static_cast<long>(j - i + 1));
    i = j + 1;
  }
  return ranks;
}

// Number of size-k subsets of `ranks` for each doubled rank sum.
std::vector<double> subset_sum_counts(const std::vector<long>& ranks, std::size_t k) {
  const long max_sum = std::accumulate(ranks.begin(), ranks.end(), 0L);
  std::vector<std::vector<double>> count(k + 1, std::vector<double>(max_sum + 1, 0.0));
  count[0][0] = 1.0;
  std::size_t seen = 0;
  for (long r : ranks) {
    ++seen;
    for (std::size_t c = std::min(k, seen); c >= 1; --c) {
      auto& dst = count[c];
      const auto& src = count[c - 1];
      for (long s = max_sum; s >= r; --s) dst[s] += src[s - r];
    }
  }
  return count[k];
}

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                                 int exact_limit) {
  require(!a.empty() && !b.empty(), "mann_whitney_u: both samples must be nonempty");
  for (double v : a) require(std::isfinite(v), "mann_whitney_u: non-finite sample");
  for (double v : b) require(std::isfinite(v), "mann_whitney_u: non-finite sample");
  const std::size_t n = a.size(), m = b.size(), total = n + m;

  std::vector<long> ties;
  const std::vector<long> ranks = doubled_midranks(a, b, &ties);
  long sum_a2 = 0;
  for (std::size_t i = 0; i < n; ++i) sum_a2 += ranks[i];

  MannWhitneyResult res;
  res.u = 0.5 * static_cast<double>(sum_a2) - 0.5 * static_cast<double>(n * (n + 1));
  if (ties.size() == 1) {
    res.degenerate = true;
    res.p = 1.0;
    res.exact = static_cast<double>(n) * static_cast<double>(m) <= exact_limit;
    return res;
  }

  if (static_cast<double>(n) * static_cast<double>(m) <= exact_limit) {
    res.exact = true;
    const long all2 = static_cast<long>(total * (total + 1));
    // Enumerate over the smaller sample; P(S_a >= s) = P(S_b <= all - s).
    const bool over_a = n <= m;
    const std::vector<double> counts = subset_sum_counts(ranks, over_a ? n : m);
    double hit = 0.0, all = 0.0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (counts[s] == 0.0) continue;
      all += counts[s];
      const long sl = static_cast<long>(s);
      if (over_a ? sl >= sum_a2 : sl <= all2 - sum_a2) hit += counts[s];
    }
    res.p = std::min(1.0, hit / all);
    return res;
  }

  const double nm = static_cast<double>(n) * static_cast<double>(m);
  const double nt = static_cast<double>(total);
  double tie_term = 0.0;
  for (long t : ties) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double var = nm / 12.0 * ((nt + 1.0) - tie_term / (nt * (nt - 1.0)));
  if (!(var > 0.0)) {
    res.degenerate = true;
    res.p = 1.0;
    return res;
  }
  const double z = (res.u - 0.5 * nm - 0.5) / std::sqrt(var);
  res.p = normal_cdf(-z);
  return res;
}

double area_under_curve(const std::vector<double>& trace) {
  require(!trace.empty(), "area_under_curve: empty trace");
  double s = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) s += 0.5 * (trace[i - 1] + trace[i]);
  return s;
}

double area_under_curve(const TrialRecord& record) {
  std::vector<double> trace;
  trace.reserve(record.rows.size());
  for (const auto& row : record.rows) trace.push_back(row.value_at_x_star);
  return area_under_curve(trace);
}

// --- Ranking ----------------------------------------------------------------------

BenchmarkRanking rank_benchmark(const std::string& benchmark, const std::vector<RuleSamples>& rules,
                                double alpha) {
  require(rules.size() >= 2, "rank_benchmark: need at least two rules");
  require(alpha > 0.0 && alpha < 0.5, "rank_benchmark: alpha must be in (0, 0.5)");
  const std::size_t r = rules.size();
  BenchmarkRanking out;
  out.benchmark = benchmark;
  out.wins.assign(r, std::vector<int>(r, 0));
  out.p_values.assign(r, std::vector<double>(r, 1.0));
  out.win_counts.assign(r, 0);
  out.tie_break_wins.assign(r, 0);
  for (const auto& s : rules) out.rules.push_back(s.rule);

  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      if (i == j) continue;
      out.p_values[i][j] = mann_whitney_u(rules[i].best, rules[j].best).p;
      if (out.p_values[i][j] < alpha) {
        out.wins[i][j] = 1;
        ++out.win_counts[i];
      }
    }
  }
  // Tie-break inside each group of equal win count, on AUC.
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      if (i == j || out.win_counts[i] != out.win_counts[j]) continue;
      if (rules[i].auc.empty() || rules[j].auc.empty()) continue;
      if (mann_whitney_u(rules[i].auc, rules[j].auc).p < alpha) ++out.tie_break_wins[i];
    }
  }
  auto key = [&](std::size_t i) { return std::make_pair(out.win_counts[i], out.tie_break_wins[i]); };
  out.rank.assign(r, 1);
  out.borda.assign(r, 0);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      if (key(j) > key(i)) ++out.rank[i];
      if (key(j) < key(i)) ++out.borda[i];
    }
  }
  return out;
}

RankingReport aggregate(const std::vector<BenchmarkRanking>& benchmarks, double alpha) {
  require(!benchmarks.empty(), "aggregate: no benchmark rankings");
  RankingReport rep;
  rep.alpha = alpha;
  rep.benchmarks = benchmarks;
  rep.rules = benchmarks.front().rules;
  const std::size_t r = rep.rules.size();
  const std::set<std::string> reference(rep.rules.begin(), rep.rules.end());
  rep.borda.assign(r, 0);
  rep.win_fraction.assign(r, std::vector<double>(r, 0.0));
  for (const auto& b : benchmarks) {
    const std::set<std::string> names(b.rules.begin(), b.rules.end());
    if (names != reference || b.rules.size() != r) {
      throw InvalidArgument("aggregate: benchmark '" + b.benchmark +
                            "' has a different rule set than '" + benchmarks.front().benchmark + "'");
    }
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) {
      idx[i] = static_cast<std::size_t>(
          std::find(b.rules.begin(), b.rules.end(), rep.rules[i]) - b.rules.begin());
    }
    for (std::size_t i = 0; i < r; ++i) {
      rep.borda[i] += b.borda[idx[i]];
      for (std::size_t j = 0; j < r; ++j) rep.win_fraction[i][j] += b.wins[idx[i]][idx[j]];
    }
  }
  for (auto& row : rep.win_fraction) {
    for (double& v : row) v /= static_cast<double>(benchmarks.size());
  }
  rep.rank.assign(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      if (rep.borda[j] > rep.borda[i]) ++rep.rank[i];
    }
  }
  return rep;
}

// --- Loading ----------------------------------------------------------------------

ResultSet load_results(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("input directory '" + dir + "' does not exist");
  static const std::regex pattern(R"(rep[0-9]+\.jsonl)");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), pattern)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, std::map<std::string, RuleSamples>> grouped;
  ResultSet out;
  for (const auto& f : files) {
    const TrialRecord rec = read_trial_jsonl(f.string());
    if (rec.aborted || rec.rows.empty()) continue;
    RuleSamples& s = grouped[rec.benchmark][rec.rule];
    s.rule = rec.rule;
    s.best.push_back(rec.rows.back().value_at_x_star);
    s.auc.push_back(area_under_curve(rec));
    ++out.trials;
  }
  if (out.trials == 0) throw IoError("no complete trial files under '" + dir + "'");
  for (auto& [bench, rules] : grouped) {
    out.benchmarks.push_back(bench);
    std::vector<RuleSamples> v;
    for (auto& [name, s] : rules) v.push_back(std::move(s));
    out.samples.push_back(std::move(v));
  }
  return out;
}

RankingReport analyze_results(const ResultSet& results, double alpha) {
  std::vector<BenchmarkRanking> rankings;
  for (std::size_t b = 0; b < results.benchmarks.size(); ++b) {
    rankings.push_back(rank_benchmark(results.benchmarks[b], results.samples[b], alpha));
  }
  return aggregate(rankings, alpha);
}

// --- Reports ----------------------------------------------------------------------

namespace {

std::vector<std::size_t> by_rank(const RankingReport& rep) {
  std::vector<std::size_t> order(rep.rules.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (rep.rank[i] != rep.rank[j]) return rep.rank[i] < rep.rank[j];
    return rep.rules[i] < rep.rules[j];
  });
  return order;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == ':' || c == '/' || c == '=') c = '_';
  }
  return out;
}

}  // namespace

std::string report_json(const RankingReport& rep) {
  json j;
  j["alpha"] = rep.alpha;
  json agg = json::array();
  for (std::size_t i : by_rank(rep)) {
    agg.push_back({{"rule", rep.rules[i]}, {"rank", rep.rank[i]}, {"borda", rep.borda[i]}});
  }
  j["aggregate"] = agg;
  j["rules"] = rep.rules;
  j["win_fraction"] = rep.win_fraction;
  json benches = json::array();
  for (const auto& b : rep.benchmarks) {
    benches.push_back({{"benchmark", b.benchmark},
                       {"rules", b.rules},
                       {"wins", b.wins},
                       {"p_values", b.p_values},
                       {"win_counts", b.win_counts},
                       {"tie_break_wins", b.tie_break_wins},
                       {"rank", b.rank},
                       {"borda", b.borda}});
  }
  j["benchmarks"] = benches;
  return j.dump(2) + "\n";
}

std::string report_csv(const RankingReport& rep) {
  std::ostringstream out;
  out << "rank,rule,borda\n";
  for (std::size_t i : by_rank(rep)) {
    out << rep.rank[i] << ',' << csv_field(rep.rules[i]) << ',' << rep.borda[i] << '\n';
  }
  return out.str();
}

std::string win_matrix_csv(const BenchmarkRanking& b) {
  std::ostringstream out;
  out << "rule";
  for (const auto& r : b.rules) out << ',' << csv_field(r);
  out << '\n';
  for (std::size_t i = 0; i < b.rules.size(); ++i) {
    out << csv_field(b.rules[i]);
    for (std::size_t j = 0; j < b.rules.size(); ++j) out << ',' << b.wins[i][j];
    out << '\n';
  }
  return out.str();
}

std::string win_fraction_csv(const RankingReport& rep) {
  std::ostringstream out;
  out << "rule";
  for (const auto& r : rep.rules) out << ',' << csv_field(r);
  out << '\n';
  out << std::setprecision(6);
  for (std::size_t i = 0; i < rep.rules.size(); ++i) {
    out << csv_field(rep.rules[i]);
    for (std::size_t j = 0; j < rep.rules.size(); ++j) out << ',' << rep.win_fraction[i][j];
    out << '\n';
  }
  return out.str();
}

std::string report_table(const RankingReport& rep) {
  std::size_t width = 4;
  for (const auto& r : rep.rules) width = std::max(width, r.size());
  std::ostringstream out;
  out << std::left << std::setw(6) << "rank" << std::setw(static_cast<int>(width) + 2) << "rule"
      << "borda\n";
  for (std::size_t i : by_rank(rep)) {
    out << std::left << std::setw(6) << rep.rank[i] << std::setw(static_cast<int>(width) + 2)
        << rep.rules[i] << rep.borda[i] << '\n';
  }
  return out.str();
}

std::vector<std::string> write_report(const RankingReport& rep, const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
    written.push_back(path);
  };
  put("ranking.json", report_json(rep));
  put("ranking.csv", report_csv(rep));
  put("win_fraction.csv", win_fraction_csv(rep));
  for (const auto& b : rep.benchmarks) put("winmatrix_" + sanitize(b.benchmark) + ".csv", win_matrix_csv(b));
  return written;
}

}  // namespace duelopt
