// Copyright 2026 The isdim Authors
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

#ifndef ISDIM_ERRORS_HPP
#define ISDIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isdim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument: wrong sizes, out-of-range parameters, violated preconditions.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A covariance (or variance) that should be positive-definite is not.
class DefinitenessError : public Error {
 public:
  using Error::Error;
};

/// The second moment of the target/proposal density is infinite.
class NonIntegrableError : public Error {
 public:
  using Error::Error;
};

/// Every log weight is -inf (or NaN); no normalization exists.
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

/// Two algebraically equivalent routes disagree beyond tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IllConditionedError : public Error {
 public:
  using Error::Error;
};

/// A bound experiment was requested for a test function without an exact target mean.
class NoOracleError : public Error {
 public:
  using Error::Error;
};

/// A moment needed by a bound is infinite or NaN.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

/// Regression requested on too few (or degenerate) points.
class FitError : public Error {
 public:
  using Error::Error;
};

/// Operation restricted to a model family was given a model outside it.
class FormError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

void require(bool condition, const std::string& message);

}  // namespace isdim

#endif
