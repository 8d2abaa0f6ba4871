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
#include <set>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "duelopt/benchmarks.hpp"
#include "duelopt/normal.hpp"
#include "duelopt/optimizer.hpp"
#include "duelopt/oracle.hpp"

using namespace duelopt;

namespace {

struct RawCase {
  const char* name;
  std::vector<double> x;
  double value;
};

const std::vector<RawCase> kRawCases = {
#include "oracles/benchmark_values.inc"
};

// Constant-slope benchmark for oracle rate checks; raw is minimization form.
BenchmarkSpec constant_spec(double scaled_value) {
  BenchmarkSpec s{"const", "Const", SearchBox(Vector::Zero(1), Vector::Ones(1)),
                  KernelFamily::SquaredExponentialARD, [scaled_value](const Vector& x) {
                    return -scaled_value * x[0];
                  }};
  return s;
}

double rate(Oracle& o, const Duel& d, int n) {
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += d.second.size() == 0 ? o.draw_point(d.first) : o.draw_duel(d);
  return static_cast<double>(ones) / n;
}

}  // namespace

TEST_CASE("raw formulas match the reference values") {
  std::set<std::string> covered;
  for (const auto& c : kRawCases) {
    const BenchmarkSpec& spec = find_benchmark(c.name);
    const Vector x = Eigen::Map<const Vector>(c.x.data(), static_cast<Eigen::Index>(c.x.size()));
    CHECK_MESSAGE(std::fabs(spec.raw(x) - c.value) <= 1e-9 * std::max(1.0, std::fabs(c.value)), c.name);
    covered.insert(c.name);
  }
  CHECK(covered.size() == 34);
  CHECK(benchmark_registry().size() == 34);
}

TEST_CASE("registry spot checks") {
  const BenchmarkSpec& ackley = find_benchmark("ackley");
  CHECK(ackley.dim() == 2);
  CHECK(ackley.box.lower()[0] == -32.768);
  CHECK(ackley.box.upper()[1] == 32.768);
  const BenchmarkSpec& h6 = find_benchmark("hartmann6");
  CHECK(h6.dim() == 6);
  CHECK(h6.box.lower().isZero());
  CHECK(h6.box.upper() == Vector::Ones(6));
  const BenchmarkSpec& camel = find_benchmark("six-hump-camel");
  CHECK(camel.box.lower()[0] == -3.0);
  CHECK(camel.box.upper()[0] == 3.0);
  CHECK(camel.box.lower()[1] == -2.0);
  CHECK(camel.box.upper()[1] == 2.0);
  CHECK(std::fabs(find_benchmark("forrester").raw(Vector::Zero(1)) - 4.0 * std::sin(-4.0)) < 1e-12);
  CHECK_THROWS_AS(find_benchmark("no-such-function"), InvalidArgument);
  CHECK_THROWS_AS(evaluate_scaled(camel, Vector::Constant(2, 5.0)), InvalidArgument);

  std::set<std::string> names;
  for (const auto& n : benchmark_names()) names.insert(n);
  CHECK(names.size() == 34);
}

TEST_CASE("scaled outputs are standardized") {
  for (const auto& spec : benchmark_registry()) {
    // Fresh points: a shifted Sobol set, not the estimation set.
    const Matrix u = sobol_points(spec.dim(), 10000, Vector::Constant(spec.dim(), 0.37));
    double s = 0.0, s2 = 0.0;
    for (Eigen::Index i = 0; i < u.cols(); ++i) {
      const double v = evaluate_scaled(spec, spec.box.from_unit(u.col(i)));
      REQUIRE(std::isfinite(v));
      s += v;
      s2 += v * v;
    }
    const double mean = s / 10000.0, sd = std::sqrt(s2 / 10000.0 - mean * mean);
    CHECK_MESSAGE(std::fabs(mean) <= 0.05, spec.name);
    CHECK_MESSAGE(std::fabs(sd - 1.0) <= 0.05, spec.name);
  }
}

TEST_CASE("sphere argmax survives scaling") {
  const BenchmarkSpec& sphere = find_benchmark("sphere");
  const double at0 = evaluate_scaled(sphere, Vector::Zero(sphere.dim()));
  RandomStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    Vector u(sphere.dim());
    for (Eigen::Index d = 0; d < u.size(); ++d) u[d] = rng.uniform();
    CHECK(at0 > evaluate_scaled(sphere, sphere.box.from_unit(u)));
  }
}

TEST_CASE("sidecar lists every benchmark") {
  const auto j = nlohmann::json::parse(benchmark_sidecar_json());
  REQUIRE(j.size() == 34);
  for (const auto& b : j) {
    CHECK(b.contains("scale_mean"));
    CHECK(b.contains("scale_std"));
    CHECK(b.at("scale_seed").get<std::uint64_t>() == kDefaultScaleSeed);
  }
}

TEST_CASE("binary oracle rates") {
  const int n = 100000;
  const BenchmarkSpec zero = constant_spec(0.0);
  SimulatedOracle a(OracleKind::Binary, zero, RandomStream(5));
  CHECK(std::fabs(rate(a, {Vector::Constant(1, 0.5), Vector()}, n) - 0.5) < 0.005);
  const BenchmarkSpec four = constant_spec(4.0);
  SimulatedOracle b(OracleKind::Binary, four, RandomStream(5));
  CHECK(rate(b, {Vector::Ones(1), Vector()}, n) >= 0.9999);

  SimulatedOracle c(OracleKind::Binary, zero, RandomStream(9)), d(OracleKind::Binary, zero, RandomStream(9));
  for (int i = 0; i < 100; ++i) CHECK(c.draw_point(Vector::Ones(1)) == d.draw_point(Vector::Ones(1)));
  CHECK_THROWS_AS(preference_oracle_draw(c, {Vector::Ones(1), Vector::Ones(1)}), InvalidArgument);
}

TEST_CASE("preference oracle rates") {
  const int n = 100000;
  const BenchmarkSpec lin = constant_spec(1.0);  // scaled f(x) = x
  const Duel flat{Vector::Constant(1, 0.3), Vector::Constant(1, 0.3)};
  const Duel step{Vector::Ones(1), Vector::Zero(1)};
  SimulatedOracle o(OracleKind::Preference, lin, RandomStream(7));
  CHECK(std::fabs(rate(o, flat, n) - 0.5) < 0.005);
  const double fwd = rate(o, step, n), back = rate(o, step.swapped(), n);
  CHECK(std::fabs(fwd + back - 1.0) < 0.01);
  CHECK(std::fabs(fwd - normal_cdf(1.0)) < 0.01);
}

TEST_CASE("interactive oracle") {
  {
    std::istringstream in("1\n");
    std::ostringstream out;
    InteractiveOracle o(in, out);
    CHECK(interactive_oracle_draw(o, {Vector::Zero(1), Vector::Ones(1)}) == 1);
  }
  {
    std::istringstream in("x\n0\n");
    std::ostringstream out;
    InteractiveOracle o(in, out);
    CHECK(interactive_oracle_draw(o, {Vector::Zero(1), Vector()}) == 0);
    CHECK(out.str().find("please answer 0 or 1") != std::string::npos);
  }
  {
    std::istringstream in("");
    std::ostringstream out;
    InteractiveOracle o(in, out);
    CHECK_THROWS_AS(o.draw_point(Vector::Zero(1)), OracleError);
  }
  {
    std::istringstream in("a\nb\nc\n1\n");
    std::ostringstream out;
    InteractiveOracle o(in, out);
    CHECK_THROWS_AS(o.draw_point(Vector::Zero(1)), OracleError);
  }
}
