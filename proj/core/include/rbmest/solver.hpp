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

#ifndef RBMEST_SOLVER_HPP
#define RBMEST_SOLVER_HPP

#include <limits>
#include <vector>

#include "rbmest/adjustment.hpp"
#include "rbmest/model.hpp"

namespace rbm {

// Residual-based rule stops on ||r||_1 < epsilon; step-based rule stops on
// ||delta||_1 < epsilon where delta is the unscaled Newton step.
enum class StoppingRule { ResidualL1, StepL1 };

struct SolverConfig {
  int max_iter = 200;
  double epsilon = 1e-8;
  int max_halvings = 20;
  StoppingRule rule = StoppingRule::ResidualL1;
  // Optional explicit start; otherwise the model's suggestion, then zeros.
  std::vector<double> start;
  // solve_rbm / maximize_penalized: warm start from the plain M-estimate.
  bool start_from_m = true;
  bool keep_trace = true;
};

struct IterationRecord {
  std::vector<double> theta;
  double residual;
  double step;  // accepted step factor a_u (0 for the starting record)
};

struct FitResult {
  std::vector<double> theta;
  bool converged = false;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
  std::vector<IterationRecord> trace;
};

// Quasi Newton-Raphson root of the summed estimating function:
// theta <- theta + a j^-1 psi, step-halved until the L1 residual decreases.
// Hitting max_iter (or a halving stall) is reported through converged=false
// with the best visited point, never an exception.
FitResult solve_m(const EstimatingModel& m, const SolverConfig& cfg = {});

// Same scheme on the adjusted system psi + A.
FitResult solve_rbm(const EstimatingModel& m, const SolverConfig& cfg = {});

enum class PenaltyVariant { HalfTrace, LogDet };

// Stationary point of the penalized objective (ObjectiveGradient models
// only): quasi Newton-Raphson on the exact penalty gradient, which for
// gradient fields is available in closed form from the second-order blocks.
// HalfTrace maximizes l - 1/2 tr(j^-1 e) and its stationarity condition is
// identical to the adjusted system solved by solve_rbm; LogDet maximizes
// l + 1/2 log|det j| - 1/2 log|det e|. Stopping follows cfg.rule, like the
// root solvers.
FitResult maximize_penalized(const EstimatingModel& m, const SolverConfig& cfg = {},
                             PenaltyVariant variant = PenaltyVariant::HalfTrace);

}  // namespace rbm

#endif  // RBMEST_SOLVER_HPP
