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

#ifndef DUELOPT_COMMON_HPP_
#define DUELOPT_COMMON_HPP_

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace duelopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error hierarchy. Everything thrown by the library derives from Error so
// callers (and the C API) can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument: dimension mismatch, invalid config, out-of-box point.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Numerical failure: non-convergence, failed factorization, non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Oracle stream closed or unusable input.
class OracleError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace duelopt

#endif  // DUELOPT_COMMON_HPP_
