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

#ifndef RBMEST_MODEL_HPP
#define RBMEST_MODEL_HPP

#include <functional>
#include <span>
#include <vector>

#include "rbmest/dual.hpp"
#include "rbmest/matrix.hpp"

namespace rbm {

// A model either supplies the p estimating-function contributions directly,
// or supplies per-unit objective contributions whose gradients act as the
// estimating functions.
enum class ModelFlavor { VectorPsi, ObjectiveGradient };

struct EstimatingModel {
  ModelFlavor flavor = ModelFlavor::VectorPsi;
  int k = 0;  // number of contributions
  int p = 0;  // parameter dimension

  // VectorPsi flavor: write psi^i(theta) into out (length p).
  std::function<void(int i, std::span<const Dual2> theta, std::span<Dual2> out)> psi;
  // Optional value-only fast path used by residual evaluations.
  std::function<void(int i, std::span<const double> theta, std::span<double> out)> psi_value;

  // ObjectiveGradient flavor: the i-th objective contribution.
  std::function<Dual2(int i, std::span<const Dual2> theta)> objective;
  std::function<double(int i, std::span<const double> theta)> objective_value;

  // Suggested starting point; solvers fall back to zeros when empty.
  std::vector<double> start;
};

// Everything the empirical bias adjustment consumes, accumulated over
// contributions in index order (the accumulation order is part of the
// reproducibility contract):
//   psi     summed estimating function
//   j       minus the summed Jacobian: row s holds -sum_i grad psi_s^i
//   e       sum_i psi^i (psi^i)^T
//   d[r]    (s,t) entry: sum_i (d psi_r^i / d theta_s) psi_t^i
//   u[r]    sum_i of the psi_r^i Hessians (filled when requested)
struct AdjustmentMatrices {
  std::vector<double> psi;
  DenseMatrix j;
  DenseMatrix e;
  std::vector<DenseMatrix> d;
  std::vector<DenseMatrix> u;
  bool has_second = false;
};

// Value of the summed estimating function. For ObjectiveGradient models this
// is the summed objective gradient.
std::vector<double> psi_sum(const EstimatingModel& m, const std::vector<double>& theta);

// Summed objective value; FlavorMismatch for VectorPsi models.
double objective_sum(const EstimatingModel& m, const std::vector<double>& theta);

// One pass over the data building the component matrices. With need_second,
// u_r is exact for VectorPsi models; for ObjectiveGradient models it is a
// central finite difference of the summed second-derivative matrix (step
// 1e-5 * max(1, |theta_s|)), symmetrized per slice.
AdjustmentMatrices assemble(const EstimatingModel& m, const std::vector<double>& theta,
                            bool need_second);

}  // namespace rbm

#endif  // RBMEST_MODEL_HPP
