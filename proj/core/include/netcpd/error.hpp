// Copyright 2026 The netcpd Authors
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

namespace netcpd {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model or configuration; the message names the offending entity.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Oracle instance larger than the configured cell budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, double required_cells)
      : Error(what), required_cells_(required_cells) {}

  double required_cells() const noexcept { return required_cells_; }

 private:
  double required_cells_;
};

/// Request outside what an algorithm supports (e.g. tree BP on a cyclic graph).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Observation record that does not cover every node and edge stream.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace netcpd
