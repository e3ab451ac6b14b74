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

#ifndef RBMEST_TOOLS_CLI_ERROR_HPP
#define RBMEST_TOOLS_CLI_ERROR_HPP

#include <stdexcept>
#include <string>

#include "rbmest/errors.hpp"

namespace rbmcli {

// Exit-code contract shared by every subcommand: 0 on success, 1 for input
// problems (files, flags, inadmissible specs), 2 for numerical problems
// (non-convergence, singular systems, failed evaluations).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumeric = 2;

struct CliError : std::runtime_error {
  CliError(int code, const std::string& message)
      : std::runtime_error(message), exit_code(code) {}
  int exit_code;
};

inline const char* error_kind(const rbm::Error& e) {
  if (dynamic_cast<const rbm::FlavorMismatch*>(&e)) return "FlavorMismatch";
  if (dynamic_cast<const rbm::InadmissibleSpec*>(&e)) return "InadmissibleSpec";
  if (dynamic_cast<const rbm::DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const rbm::DegenerateData*>(&e)) return "DegenerateData";
  if (dynamic_cast<const rbm::EmptyParameter*>(&e)) return "EmptyParameter";
  if (dynamic_cast<const rbm::SingularMatrix*>(&e)) return "SingularMatrix";
  if (dynamic_cast<const rbm::EvaluationFailed*>(&e)) return "EvaluationFailed";
  if (dynamic_cast<const rbm::NonFinite*>(&e)) return "NonFinite";
  if (dynamic_cast<const rbm::LinkDomainError*>(&e)) return "LinkDomainError";
  if (dynamic_cast<const rbm::DomainError*>(&e)) return "DomainError";
  return "Error";
}

// Specification-shaped problems are the caller's input; everything else that
// the library throws is a numerical failure of the fit.
inline int error_exit_code(const rbm::Error& e) {
  if (dynamic_cast<const rbm::FlavorMismatch*>(&e) ||
      dynamic_cast<const rbm::InadmissibleSpec*>(&e) ||
      dynamic_cast<const rbm::DimensionMismatch*>(&e) ||
      dynamic_cast<const rbm::DegenerateData*>(&e) ||
      dynamic_cast<const rbm::EmptyParameter*>(&e))
    return kExitInput;
  return kExitNumeric;
}

}  // namespace rbmcli

#endif  // RBMEST_TOOLS_CLI_ERROR_HPP
