// Copyright 2026 The rbmest authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBMEST_ERRORS_HPP
#define RBMEST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rbm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Factorization hit a pivot below the relative threshold.
struct SingularMatrix : Error {
  using Error::Error;
};

// Scalar function evaluated outside its domain (log of a non-positive
// value, fitted probability at 0/1, ...).
struct DomainError : Error {
  using Error::Error;
};

// DomainError raised specifically by an inverse-link / mean-domain check.
struct LinkDomainError : DomainError {
  using DomainError::DomainError;
};

// A model contribution failed to evaluate; carries the contribution index.
struct EvaluationFailed : Error {
  EvaluationFailed(int index, const std::string& what)
      : Error("contribution " + std::to_string(index) + ": " + what),
        index(index) {}
  int index;
};

// Operation requires the other model flavor (e.g. a penalized objective on a
// model that only supplies estimating-function values).
struct FlavorMismatch : Error {
  using Error::Error;
};

struct NonFinite : Error {
  using Error::Error;
};

// Data degenerate for a closed-form estimator (zero denominators and such).
struct DegenerateData : Error {
  using Error::Error;
};

// Structurally invalid model specification (dimension conflicts, responses
// outside the family's support, unsupported dispersion mode).
struct InadmissibleSpec : Error {
  using Error::Error;
};

// Differentiation requested with an empty parameter vector.
struct EmptyParameter : Error {
  using Error::Error;
};

}  // namespace rbm

#endif  // RBMEST_ERRORS_HPP
