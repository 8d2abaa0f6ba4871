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

#ifndef DUELOPT_RANDOM_HPP_
#define DUELOPT_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <string_view>

#include "duelopt/common.hpp"

namespace duelopt {

/// Explicit random stream handed to every stochastic operation.
///
/// Wraps a 64-bit Mersenne twister. Uniform and normal variates are derived
/// with portable arithmetic (no std::*_distribution) so that a seed produces
/// the same bit sequence on every standard library.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Marsaglia polar method, second variate cached).
  double normal();

  Vector normal_vector(Eigen::Index n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Index in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Independent child stream identified by a tag; does not advance *this.
  RandomStream derive(std::string_view tag) const;

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

}  // namespace duelopt

#endif  // DUELOPT_RANDOM_HPP_
