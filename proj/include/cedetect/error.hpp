// Copyright 2026 The cedetect Authors.
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

#ifndef CEDETECT_ERROR_HPP_
#define CEDETECT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace cedetect {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The requested quantity does not exist for the given parameters, e.g. an
// epsilon outside (0, u_pi - u_min) or a KL budget at or above -log pi(u_min).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// A root finder or estimator failed to reach its declared tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cedetect

#endif  // CEDETECT_ERROR_HPP_
