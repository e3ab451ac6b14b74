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

#ifndef RBMEST_QUASI_HPP
#define RBMEST_QUASI_HPP

#include <vector>

#include "rbmest/glm.hpp"
#include "rbmest/model.hpp"

namespace rbm {

// Working variance v(mu) for the quasi-score.
enum class VarianceFunction { One, Mu, MuSquared, MuOneMinusMu };

// MomentPhi: estimate beta from the quasi-score alone (the dispersion scales
// out) and recover phi afterwards from the Pearson statistic. AdjustedJointPhi:
// append the moment equation for phi and solve the (p+1)-dimensional system
// jointly, so phi gets its own bias adjustment.
enum class QuasiMode { MomentPhi, AdjustedJointPhi };

struct QuasiSpec {
  Link link = Link::Identity;
  VarianceFunction varfun = VarianceFunction::One;
  DenseMatrix x;
  std::vector<double> y;
  std::vector<double> weights;  // m_i; empty = ones
  QuasiMode mode = QuasiMode::MomentPhi;
  int moment_r = -1;  // Pearson divisor R; -1 picks n - p
};

EstimatingModel quasi_model(const QuasiSpec& spec);

// Pearson moment estimate sum_i m_i (y_i - mu_i)^2 / v(mu_i) divided by R.
double quasi_phi_moment(const QuasiSpec& spec, const std::vector<double>& beta,
                        int r_divisor = -1);

// Closed-form blocks for the joint (beta, phi) system, assembled from the
// per-observation chain-rule scalars. Serves as the independent oracle for
// the differentiated versions; d[r] and u[r] follow the same layout as
// AdjustmentMatrices.
struct QuasiMatrices {
  DenseMatrix j;
  DenseMatrix e;
  std::vector<DenseMatrix> d;
  std::vector<DenseMatrix> u;
};
QuasiMatrices quasi_appendix_matrices(const QuasiSpec& spec, const std::vector<double>& beta,
                                      double phi);

}  // namespace rbm

#endif  // RBMEST_QUASI_HPP
