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

#ifndef DUELOPT_BENCHMARKS_HPP_
#define DUELOPT_BENCHMARKS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "duelopt/common.hpp"
#include "duelopt/kernels.hpp"

namespace duelopt {

inline constexpr std::uint64_t kDefaultScaleSeed = 20210;
inline constexpr int kScalePoints = 10000;

struct BenchmarkSpec {
  std::string name;          // CLI identifier, e.g. "six-hump-camel"
  std::string display_name;  // e.g. "Six-Hump Camel"
  SearchBox box;
  KernelFamily kernel_family;
  /// Library formula in its usual minimization form.
  std::function<double(const Vector&)> raw;
  double scale_mean = 0.0;  // of -raw
  double scale_std = 1.0;
  std::uint64_t scale_seed = kDefaultScaleSeed;
  /// Free-text note on conventions (e.g. the Perm beta in use).
  std::string note;

  Eigen::Index dim() const { return box.dim(); }
};

/// All registered benchmarks, scaling constants estimated on first use.
const std::vector<BenchmarkSpec>& benchmark_registry();

/// Throws InvalidArgument listing valid names.
const BenchmarkSpec& find_benchmark(const std::string& name);

std::vector<std::string> benchmark_names();

/// (-raw(x) - scale_mean) / scale_std; maximization form, zero mean and unit
/// variance over the box. Throws InvalidArgument outside the box.
double evaluate_scaled(const BenchmarkSpec& spec, const Vector& x);

/// Mean and standard deviation of -raw over kScalePoints shifted Sobol points.
std::pair<double, double> estimate_scaling(const BenchmarkSpec& spec, std::uint64_t seed,
                                           int points = kScalePoints);

/// Sidecar: [{name, d, box, kernel_family, scale_mean, scale_std, scale_seed, note}].
std::string benchmark_sidecar_json();
void write_benchmark_sidecar(const std::string& path);

}  // namespace duelopt

#endif  // DUELOPT_BENCHMARKS_HPP_
