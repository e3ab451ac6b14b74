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

#ifndef RBMEST_GLM_HPP
#define RBMEST_GLM_HPP

#include <vector>

#include "rbmest/model.hpp"

namespace rbm {

enum class Family { Normal, Poisson, Binomial, Gamma };
enum class Link { Identity, Log, Logit, Probit };
enum class DispersionMode { Known, Unknown };

struct GlmSpec {
  Family family = Family::Normal;
  Link link = Link::Identity;
  DenseMatrix x;                 // n x p design, intercept column included by the caller
  std::vector<double> y;         // binomial responses are proportions in [0,1]
  std::vector<double> weights;   // m_i (binomial totals / prior weights); empty = ones
  DispersionMode dispersion = DispersionMode::Known;
  double phi = 1.0;              // dispersion value when Known
};

// Exact log-likelihood contributions; parameter vector is beta, with phi
// appended when dispersion is Unknown (Normal and Gamma families only).
EstimatingModel glm_model(const GlmSpec& spec);

// Closed-form j and e from the weighted-design algebra, the independent
// cross-check for the differentiated versions. Known dispersion gives the
// p x p beta blocks at spec.phi; Unknown appends the dispersion row/column.
struct GlmMatrices {
  DenseMatrix j;
  DenseMatrix e;
};
GlmMatrices glm_appendix_matrices(const GlmSpec& spec, const std::vector<double>& beta,
                                  double phi);

// Fixed-dispersion penalized objective on the phi-multiplied scale:
//   sum_i m_i (y_i theta_i - kappa(theta_i)) - 1/2 sum_i s_i wtil_i,
// with s_i = wtil_i x_i^T (X^T Q X)^-1 x_i, so no n x n matrix is formed.
// Equals phi * (penalized objective) plus a beta-free constant; stationary
// points coincide with the reduced-bias beta equations.
double glm_penalized_fast(const GlmSpec& spec, const std::vector<double>& beta);

}  // namespace rbm

#endif  // RBMEST_GLM_HPP
