// Copyright 2026 The qcm Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qcm {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different truncated spaces or have incompatible shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Index or argument outside the admissible range (e.g. empty interior, bad channel index).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Model or observable data violates a structural condition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Time stepping failed (step rejection overflow, non-finite values, drift checks).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// |Phi| exceeded its contractivity bound; usually a truncation or step-size problem.
class ContractivityError : public IntegrationError {
 public:
  using IntegrationError::IntegrationError;
};

/// Fourier inversion of a characteristic function produced unusable output.
class InversionError : public Error {
 public:
  using Error::Error;
};

/// The characteristic function has not decayed at the edge of the kappa grid.
class AliasingError : public InversionError {
 public:
  using InversionError::InversionError;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcm
