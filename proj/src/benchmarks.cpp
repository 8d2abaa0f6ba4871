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

#include "duelopt/benchmarks.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "duelopt/normal.hpp"
#include "duelopt/optimizer.hpp"
#include "duelopt/random.hpp"

namespace duelopt {

namespace {

using Fn = std::function<double(const Vector&)>;

constexpr double kE = 2.71828182845904523536;

Vector filled(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SearchBox cube(Eigen::Index d, double lo, double hi) {
  return SearchBox(Vector::Constant(d, lo), Vector::Constant(d, hi));
}

double sq(double x) { return x * x; }

double ackley(const Vector& x) {
  const double d = static_cast<double>(x.size());
  const double s1 = x.squaredNorm() / d;
  const double s2 = (2.0 * kPi * x.array()).cos().sum() / d;
  return -20.0 * std::exp(-0.2 * std::sqrt(s1)) - std::exp(s2) + 20.0 + kE;
}

double beale(const Vector& x) {
  const double a = x[0], b = x[1];
  return sq(1.5 - a + a * b) + sq(2.25 - a + a * b * b) + sq(2.625 - a + a * b * b * b);
}

double bohachevsky(const Vector& x) {
  return sq(x[0]) + 2.0 * sq(x[1]) - 0.3 * std::cos(3.0 * kPi * x[0]) -
         0.4 * std::cos(4.0 * kPi * x[1]) + 0.7;
}

double three_hump_camel(const Vector& x) {
  const double a = x[0], b = x[1];
  return 2.0 * a * a - 1.05 * std::pow(a, 4) + std::pow(a, 6) / 6.0 + a * b + b * b;
}

double six_hump_camel(const Vector& x) {
  const double a = x[0], b = x[1];
  return (4.0 - 2.1 * a * a + std::pow(a, 4) / 3.0) * a * a + a * b + (-4.0 + 4.0 * b * b) * b * b;
}

double colville(const Vector& x) {
  return 100.0 * sq(x[0] * x[0] - x[1]) + sq(x[0] - 1.0) + sq(x[2] - 1.0) +
         90.0 * sq(x[2] * x[2] - x[3]) + 10.1 * (sq(x[1] - 1.0) + sq(x[3] - 1.0)) +
         19.8 * (x[1] - 1.0) * (x[3] - 1.0);
}

double cross_in_tray(const Vector& x) {
  const double inner = std::fabs(100.0 - std::hypot(x[0], x[1]) / kPi);
  const double v = std::fabs(std::sin(x[0]) * std::sin(x[1]) * std::exp(inner)) + 1.0;
  return -1e-4 * std::pow(v, 0.1);
}

double dixon_price(const Vector& x) {
  double s = sq(x[0] - 1.0);
  for (Eigen::Index i = 1; i < x.size(); ++i) s += (i + 1.0) * sq(2.0 * x[i] * x[i] - x[i - 1]);
  return s;
}

double drop_wave(const Vector& x) {
  const double r2 = x.squaredNorm();
  return -(1.0 + std::cos(12.0 * std::sqrt(r2))) / (0.5 * r2 + 2.0);
}

double eggholder(const Vector& x) {
  const double a = x[0], b = x[1];
  return -(b + 47.0) * std::sin(std::sqrt(std::fabs(b + a / 2.0 + 47.0))) -
         a * std::sin(std::sqrt(std::fabs(a - (b + 47.0))));
}

double forrester(const Vector& x) { return sq(6.0 * x[0] - 2.0) * std::sin(12.0 * x[0] - 4.0); }

double goldstein_price(const Vector& x) {
  const double a = x[0], b = x[1];
  const double t1 = 1.0 + sq(a + b + 1.0) *
                              (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
  const double t2 = 30.0 + sq(2.0 * a - 3.0 * b) * (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b -
                                                    36.0 * a * b + 27.0 * b * b);
  return t1 * t2;
}

double griewank(const Vector& x) {
  double s = 0.0, p = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += x[i] * x[i] / 4000.0;
    p *= std::cos(x[i] / std::sqrt(i + 1.0));
  }
  return s - p + 1.0;
}

double gramacy_lee(const Vector& x) {
  return std::sin(10.0 * kPi * x[0]) / (2.0 * x[0]) + std::pow(x[0] - 1.0, 4);
}

// Hartmann family: -sum_i alpha_i exp(-sum_j A_ij (x_j - P_ij)^2).
constexpr double kHartmannAlpha[4] = {1.0, 1.2, 3.0, 3.2};
constexpr double kHartmann3A[4][3] = {{3, 10, 30}, {0.1, 10, 35}, {3, 10, 30}, {0.1, 10, 35}};
constexpr double kHartmann3P[4][3] = {
    {3689, 1170, 2673}, {4699, 4387, 7470}, {1091, 8732, 5547}, {381, 5743, 8828}};
constexpr double kHartmann6A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                      {0.05, 10, 17, 0.1, 8, 14},
                                      {3, 3.5, 1.7, 10, 17, 8},
                                      {17, 8, 0.05, 10, 0.1, 14}};
constexpr double kHartmann6P[4][6] = {{1312, 1696, 5569, 124, 8283, 5886},
                                      {2329, 4135, 8307, 3736, 1004, 9991},
                                      {2348, 1451, 3522, 2883, 3047, 6650},
                                      {4047, 8828, 8732, 5743, 1091, 381}};

template <int D, int Cols>
double hartmann_sum(const Vector& x, const double (&a)[4][Cols], const double (&p)[4][Cols]) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < D; ++j) inner += a[i][j] * sq(x[j] - 1e-4 * p[i][j]);
    s += kHartmannAlpha[i] * std::exp(-inner);
  }
  return s;
}

double hartmann3(const Vector& x) { return -hartmann_sum<3>(x, kHartmann3A, kHartmann3P); }
double hartmann4(const Vector& x) {
  return (1.1 - hartmann_sum<4>(x, kHartmann6A, kHartmann6P)) / 0.839;
}
double hartmann6(const Vector& x) { return -hartmann_sum<6>(x, kHartmann6A, kHartmann6P); }

double holder_table(const Vector& x) {
  return -std::fabs(std::sin(x[0]) * std::cos(x[1]) *
                    std::exp(std::fabs(1.0 - std::hypot(x[0], x[1]) / kPi)));
}

double langermann(const Vector& x) {
  constexpr double c[5] = {1, 2, 5, 2, 3};
  constexpr double a[5][2] = {{3, 5}, {5, 2}, {2, 1}, {1, 4}, {7, 9}};
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double r = sq(x[0] - a[i][0]) + sq(x[1] - a[i][1]);
    s += c[i] * std::exp(-r / kPi) * std::cos(kPi * r);
  }
  return s;
}

double levy(const Vector& x) {
  const Eigen::Index d = x.size();
  auto w = [&](Eigen::Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  double s = sq(std::sin(kPi * w(0)));
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    s += sq(w(i) - 1.0) * (1.0 + 10.0 * sq(std::sin(kPi * w(i) + 1.0)));
  }
  s += sq(w(d - 1) - 1.0) * (1.0 + sq(std::sin(2.0 * kPi * w(d - 1))));
  return s;
}

double levy13(const Vector& x) {
  const double a = x[0], b = x[1];
  return sq(std::sin(3.0 * kPi * a)) + sq(a - 1.0) * (1.0 + sq(std::sin(3.0 * kPi * b))) +
         sq(b - 1.0) * (1.0 + sq(std::sin(2.0 * kPi * b)));
}

constexpr double kPerm0Beta = 10.0;
constexpr double kPermBeta = 0.5;

double perm0(const Vector& x) {
  const Eigen::Index d = x.size();
  double s = 0.0;
  for (Eigen::Index i = 1; i <= d; ++i) {
    double inner = 0.0;
    for (Eigen::Index j = 1; j <= d; ++j) {
      inner += (j + kPerm0Beta) * (std::pow(x[j - 1], i) - 1.0 / std::pow(j, i));
    }
    s += inner * inner;
  }
  return s;
}

double perm(const Vector& x) {
  const Eigen::Index d = x.size();
  double s = 0.0;
  for (Eigen::Index i = 1; i <= d; ++i) {
    double inner = 0.0;
    for (Eigen::Index j = 1; j <= d; ++j) {
      inner += (std::pow(j, i) + kPermBeta) * (std::pow(x[j - 1] / j, i) - 1.0);
    }
    s += inner * inner;
  }
  return s;
}

double powell(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index k = 0; k + 3 < x.size(); k += 4) {
    s += sq(x[k] + 10.0 * x[k + 1]) + 5.0 * sq(x[k + 2] - x[k + 3]) +
         std::pow(x[k + 1] - 2.0 * x[k + 2], 4) + 10.0 * std::pow(x[k] - x[k + 3], 4);
  }
  return s;
}

double rosenbrock(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    s += 100.0 * sq(x[i + 1] - x[i] * x[i]) + sq(x[i] - 1.0);
  }
  return s;
}

double rotated_hyper_ellipsoid(const Vector& x) {
  double s = 0.0, partial = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    partial += x[i] * x[i];
    s += partial;
  }
  return s;
}

double schaffer4(const Vector& x) {
  const double a = x[0] * x[0], b = x[1] * x[1];
  return 0.5 + (sq(std::cos(std::sin(std::fabs(a - b)))) - 0.5) / sq(1.0 + 0.001 * (a + b));
}

double schwefel(const Vector& x) {
  double s = 418.9829 * static_cast<double>(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) s -= x[i] * std::sin(std::sqrt(std::fabs(x[i])));
  return s;
}

double shekel(const Vector& x) {
  constexpr double beta[10] = {1, 2, 2, 4, 4, 6, 3, 7, 5, 5};
  constexpr double c[4][10] = {{4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
                               {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6},
                               {4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
                               {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6}};
  double s = 0.0;
  for (int i = 0; i < 10; ++i) {
    double inner = 0.1 * beta[i];
    for (int j = 0; j < 4; ++j) inner += sq(x[j] - c[j][i]);
    s -= 1.0 / inner;
  }
  return s;
}

double shubert(const Vector& x) {
  double p = 1.0;
  for (Eigen::Index k = 0; k < 2; ++k) {
    double s = 0.0;
    for (int i = 1; i <= 5; ++i) s += i * std::cos((i + 1.0) * x[k] + i);
    p *= s;
  }
  return p;
}

double sphere(const Vector& x) { return x.squaredNorm(); }

double sum_squares(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (i + 1.0) * x[i] * x[i];
  return s;
}

double trid(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += sq(x[i] - 1.0);
    if (i > 0) s -= x[i] * x[i - 1];
  }
  return s;
}

double ursem_waves(const Vector& x) {
  const double a = x[0], b = x[1];
  return -0.9 * a * a + (b * b - 4.5 * b * b) * a * b +
         4.7 * std::cos(3.0 * a - b * b * (2.0 + a)) * std::sin(2.5 * kPi * a);
}

BenchmarkSpec make(std::string name, std::string display, SearchBox box, KernelFamily family,
                   Fn raw, std::string note = {}) {
  return BenchmarkSpec{std::move(name), std::move(display), std::move(box), family,
                       std::move(raw),  0.0,                1.0,            kDefaultScaleSeed,
                       std::move(note)};
}

std::vector<BenchmarkSpec> build_registry() {
  using K = KernelFamily;
  const K se = K::SquaredExponentialARD, m32 = K::Matern32, m52 = K::Matern52;
  std::vector<BenchmarkSpec> r;
  r.push_back(make("ackley", "Ackley", cube(2, -32.768, 32.768), m32, ackley));
  r.push_back(make("beale", "Beale", cube(2, -4.5, 4.5), se, beale));
  r.push_back(make("bohachevsky", "Bohachevsky", cube(2, -100, 100), se, bohachevsky));
  r.push_back(make("three-hump-camel", "Three-Hump Camel", cube(2, -5, 5), m52, three_hump_camel));
  r.push_back(make("six-hump-camel", "Six-Hump Camel",
                   SearchBox(filled({-3, -2}), filled({3, 2})), se, six_hump_camel));
  r.push_back(make("colville", "Colville", cube(4, -10, 10), m52, colville));
  r.push_back(make("cross-in-tray", "Cross-in-Tray", cube(2, -10, 10), m52, cross_in_tray));
  r.push_back(make("dixon-price", "Dixon-Price", cube(2, -5, 5), m52, dixon_price));
  r.push_back(make("drop-wave", "Drop-Wave", cube(2, -5.12, 5.12), m32, drop_wave));
  r.push_back(make("eggholder", "Eggholder", cube(2, -512, 512), se, eggholder));
  r.push_back(make("forrester", "Forrester et al (2008)", cube(1, 0, 1), se, forrester));
  r.push_back(make("goldstein-price", "Goldstein-Price", cube(2, -2, 2), se, goldstein_price));
  r.push_back(make("griewank", "Griewank", cube(2, -600, 600), se, griewank));
  r.push_back(make("gramacy-lee", "Gramacy and Lee (2012)", cube(1, 0.5, 2.5), se, gramacy_lee));
  r.push_back(make("hartmann3", "Hartmann 3-D", cube(3, 0, 1), se, hartmann3));
  r.push_back(make("hartmann4", "Hartmann 4D", cube(4, 0, 1), se, hartmann4));
  r.push_back(make("hartmann6", "Hartmann 6D", cube(6, 0, 1), se, hartmann6));
  r.push_back(make("holder", "Holder", cube(2, -10, 10), se, holder_table));
  r.push_back(make("langermann", "Langer", cube(2, 0, 10), m32, langermann));
  r.push_back(make("levy", "Levy", cube(2, -10, 10), se, levy));
  r.push_back(make("levy13", "Levy N.13", cube(2, -10, 10), m52, levy13));
  r.push_back(make("perm0", "Perm 0,d,beta", cube(2, -2, 2), se, perm0, "beta = 10"));
  r.push_back(make("perm", "Perm d,beta", cube(2, -2, 2), se, perm, "beta = 0.5"));
  r.push_back(make("powell", "Powell", cube(4, -4, 5), se, powell));
  r.push_back(make("rosenbrock", "Rosenbrock", cube(2, -2.048, 2.048), se, rosenbrock));
  r.push_back(make("rotated-hyper-ellipsoid", "Rotated Hyper-Ellipsoid", cube(2, -65.536, 65.536),
                   m32, rotated_hyper_ellipsoid));
  r.push_back(make("schaffer4", "Schaffer n4", cube(2, -100, 100), m32, schaffer4));
  r.push_back(make("schwefel", "Schwefel", cube(2, -500, 500), se, schwefel));
  r.push_back(make("shekel", "Shekel", cube(4, 0, 10), se, shekel, "m = 10"));
  r.push_back(make("shubert", "Schubert", cube(2, 0, 10), m32, shubert));
  r.push_back(make("sphere", "Sphere", cube(2, -5.12, 5.12), se, sphere));
  r.push_back(make("sum-squares", "Sum Squares", cube(2, -10, 10), se, sum_squares));
  r.push_back(make("trid", "Trid", cube(2, -4, 4), se, trid));
  r.push_back(make("ursem-waves", "Ursem Waves", SearchBox(filled({-1.2, -0.9}), filled({1.2, 1.2})),
                   se, ursem_waves));
  for (auto& spec : r) {
    const auto [mean, sd] = estimate_scaling(spec, spec.scale_seed);
    spec.scale_mean = mean;
    spec.scale_std = sd;
  }
  return r;
}

}  // namespace

std::pair<double, double> estimate_scaling(const BenchmarkSpec& spec, std::uint64_t seed,
                                           int points) {
  require(points >= 2, "estimate_scaling: need at least two points");
  RandomStream rng(derive_seed(seed, spec.name));
  Vector shift(spec.dim());
  for (Eigen::Index i = 0; i < shift.size(); ++i) shift[i] = rng.uniform();
  const Matrix unit = sobol_points(spec.dim(), points, shift);
  // Welford for stability on functions with large offsets.
  double mean = 0.0, m2 = 0.0;
  for (int j = 0; j < points; ++j) {
    const double v = -spec.raw(spec.box.from_unit(unit.col(j)));
    if (!std::isfinite(v)) {
      throw NumericalError("benchmark '" + spec.name + "' is not finite inside its box");
    }
    const double delta = v - mean;
    mean += delta / (j + 1);
    m2 += delta * (v - mean);
  }
  const double sd = std::sqrt(m2 / (points - 1));
  if (!(sd > 0.0)) throw NumericalError("benchmark '" + spec.name + "' is constant on its box");
  return {mean, sd};
}

const std::vector<BenchmarkSpec>& benchmark_registry() {
  static const std::vector<BenchmarkSpec> registry = build_registry();
  return registry;
}

std::vector<std::string> benchmark_names() {
  std::vector<std::string> out;
  for (const auto& b : benchmark_registry()) out.push_back(b.name);
  return out;
}

const BenchmarkSpec& find_benchmark(const std::string& name) {
  for (const auto& b : benchmark_registry()) {
    if (b.name == name) return b;
  }
  std::string valid;
  for (const auto& n : benchmark_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown benchmark '" + name + "'; valid benchmarks: " + valid);
}

double evaluate_scaled(const BenchmarkSpec& spec, const Vector& x) {
  require(spec.box.contains(x, 1e-9), "evaluate_scaled: point outside the box of '" + spec.name + "'");
  return (-spec.raw(x) - spec.scale_mean) / spec.scale_std;
}

std::string benchmark_sidecar_json() {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : benchmark_registry()) {
    const Vector& lo = b.box.lower();
    const Vector& hi = b.box.upper();
    nlohmann::json j = {
        {"name", b.name},
        {"display_name", b.display_name},
        {"d", b.dim()},
        {"box",
         {{"lower", std::vector<double>(lo.data(), lo.data() + lo.size())},
          {"upper", std::vector<double>(hi.data(), hi.data() + hi.size())}}},
        {"kernel_family", to_string(b.kernel_family)},
        {"scale_mean", b.scale_mean},
        {"scale_std", b.scale_std},
        {"scale_seed", b.scale_seed},
    };
    if (!b.note.empty()) j["note"] = b.note;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

void write_benchmark_sidecar(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << benchmark_sidecar_json() << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace duelopt
