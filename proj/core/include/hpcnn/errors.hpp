// Copyright 2026 The HPCNeuroNet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HPCNN_ERRORS_HPP_
#define HPCNN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace hpcnn {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or layer dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An architecture, precision, or generator configuration is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An API was called in a way its contract forbids (bad label, empty input, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data could not be read or validated. Subclassed for schema and I/O.
class DataError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

// A numeric invariant failed at runtime (NaN loss, divergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

// A value-level contract was violated (e.g. a spike train that is not binary).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace hpcnn

#endif  // HPCNN_ERRORS_HPP_
