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

#ifndef RBMEST_ADJUSTMENT_HPP
#define RBMEST_ADJUSTMENT_HPP

#include <optional>
#include <vector>

#include "rbmest/model.hpp"

namespace rbm {

// Empirical bias-reducing adjustment
//   A_r = -tr(j^-1 d_r) - 1/2 tr(j^-1 e j^-T u_r),
// computed through LU solves against j (j is never inverted explicitly).
// Requires second-order blocks in mats.
std::vector<double> empirical_adjustment(const AdjustmentMatrices& mats);

// l(theta) - 1/2 tr(j^-1 e). FlavorMismatch for VectorPsi models.
double penalized_objective(const EstimatingModel& m, const std::vector<double>& theta);

// l(theta) + 1/2 log|det j| - 1/2 log|det e|.
double penalized_objective_logdet(const EstimatingModel& m, const std::vector<double>& theta);

// Single bias-correcting update from a solved M-estimate:
// theta + j(theta)^-1 A(theta).
std::vector<double> one_step(const EstimatingModel& m, const std::vector<double>& theta_hat);

// Adjusted system psi(theta) + A(theta) with a one-slot cache keyed on theta,
// so a solver accept step doesn't pay for assembly twice.
class AdjustedSystem {
 public:
  explicit AdjustedSystem(const EstimatingModel& m) : model_(&m) {}

  struct State {
    std::vector<double> theta;
    AdjustmentMatrices mats;
    std::vector<double> adjustment;
    std::vector<double> adjusted_psi;  // psi + A
  };

  const State& at(const std::vector<double>& theta);

 private:
  const EstimatingModel* model_;
  std::optional<State> cache_;
};

}  // namespace rbm

#endif  // RBMEST_ADJUSTMENT_HPP
