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

#ifndef DUELOPT_NORMAL_HPP_
#define DUELOPT_NORMAL_HPP_

namespace duelopt {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal CDF, via erfc so both tails keep relative accuracy.
double normal_cdf(double z);

/// log Phi(z). Uses a continued fraction for the Mills ratio below z = -6.
double log_normal_cdf(double z);

/// phi(z) / Phi(z), stable for very negative z.
double normal_hazard(double z);

/// Inverse CDF. Acklam's rational approximation refined by Halley steps;
/// throws InvalidArgument outside (0, 1).
double normal_quantile(double p);

}  // namespace duelopt

#endif  // DUELOPT_NORMAL_HPP_
