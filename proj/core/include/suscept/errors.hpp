// Copyright 2026 The suscept-lab Authors
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

#ifndef SUSCEPT_ERRORS_HPP_
#define SUSCEPT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace suscept {

// Bad arguments, violated preconditions, mismatched shapes.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures that happen while computing (as opposed to bad input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A loss or observable evaluated to NaN/inf.
class NonFiniteError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// SGLD iterate left the configured radius around the reference parameter.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, double step_size, double suggested)
      : NumericalError(what), step_size_(step_size), suggested_(suggested) {}
  double step_size() const { return step_size_; }
  double suggested_step_size() const { return suggested_; }

 private:
  double step_size_;
  double suggested_;
};

// Quadrature grid truncates a non-negligible part of the posterior mass.
class BoundaryMassError : public NumericalError {
 public:
  BoundaryMassError(const std::string& what, double fraction)
      : NumericalError(what), fraction_(fraction) {}
  double boundary_fraction() const { return fraction_; }

 private:
  double fraction_;
};

// Chains built from different problems were combined.
class FingerprintMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Standardization hit a component whose profile has zero spread.
class ZeroVarianceError : public NumericalError {
 public:
  ZeroVarianceError(const std::string& what, std::size_t row)
      : NumericalError(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

}  // namespace suscept

#endif  // SUSCEPT_ERRORS_HPP_
