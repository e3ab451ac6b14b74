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

#ifndef RBMEST_INFERENCE_HPP
#define RBMEST_INFERENCE_HPP

#include <vector>

#include "rbmest/model.hpp"
#include "rbmest/special.hpp"

namespace rbm {

struct VarianceEstimate {
  DenseMatrix vhat;        // j^-1 e j^-T, symmetrized
  std::vector<double> se;  // sqrt of the diagonal
};

// Sandwich variance estimate from assembled component matrices. Diagonal
// entries within a relative -1e-12 of zero clamp to zero; anything more
// negative raises NonFinite.
VarianceEstimate sandwich(const AdjustmentMatrices& mats);

struct PivotResult {
  double statistic = 0.0;
  int df = 0;
  double pvalue = 1.0;
};

// Wald-type pivot (theta_tilde - theta0)^T Vhat^-1 (theta_tilde - theta0),
// asymptotically chi-squared with p degrees of freedom.
PivotResult wald_pivot(const std::vector<double>& theta_tilde,
                       const std::vector<double>& theta0, const VarianceEstimate& v);

// Generalized score pivot: the adjusted estimating function at theta0,
// normed by e evaluated at the reduced-bias estimate.
PivotResult score_pivot(const EstimatingModel& m, const std::vector<double>& theta0,
                        const std::vector<double>& theta_tilde);

enum class CriterionKind { TIC, AIC, CLIC };
enum class EvaluatedAt { MEstimate, RbmEstimate };

struct CriterionValue {
  CriterionKind kind = CriterionKind::TIC;
  EvaluatedAt at = EvaluatedAt::MEstimate;
  double objective = 0.0;      // l at the evaluation point
  double penalty = 0.0;        // tr(j^-1 e), or p for AIC
  double minus_two = 0.0;      // -2 l + 2 penalty (smaller is better)
  double larger_better = 0.0;  // l - penalty
};

CriterionValue tic(const EstimatingModel& m, const std::vector<double>& theta,
                   EvaluatedAt at = EvaluatedAt::MEstimate);
CriterionValue aic(const EstimatingModel& m, const std::vector<double>& theta,
                   EvaluatedAt at = EvaluatedAt::MEstimate);
// Composite-likelihood information criterion; same functional form as TIC
// with the objective understood as a composite log-likelihood.
CriterionValue clic(const EstimatingModel& m, const std::vector<double>& theta,
                    EvaluatedAt at = EvaluatedAt::MEstimate);

// w_k = exp(-Delta_k) / sum_i exp(-Delta_i), Delta_k = (C_k - min C) / 2,
// on criterion values in the minus-two scale.
std::vector<double> criterion_weights(const std::vector<double>& minus_two_values);

}  // namespace rbm

#endif  // RBMEST_INFERENCE_HPP
