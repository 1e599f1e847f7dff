/*
 * Copyright 2026 The tvdepth authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef TVDEPTH_ERRORS_HPP
#define TVDEPTH_ERRORS_HPP

#include <stdexcept>

namespace tvdepth {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A curve, weight vector, or envelope does not match the dataset grid.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// A value or index lies outside its mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Every grid column is constant, so sd-based weights are undefined.
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

/// Too few curves for the requested operation.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (CSV, PGM); the message names the location.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure (unreadable input, unwritable output).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (e.g. covariance factorization did not converge).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace tvdepth

#endif  // TVDEPTH_ERRORS_HPP
