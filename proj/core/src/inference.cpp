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

#include "rbmest/inference.hpp"

#include <algorithm>
#include <cmath>

#include "rbmest/adjustment.hpp"

namespace rbm {

VarianceEstimate sandwich(const AdjustmentMatrices& mats) {
  const int p = static_cast<int>(mats.psi.size());
  const LuFactorization lu = lu_factor(mats.j);
  const DenseMatrix jinv_e = solve(lu, mats.e);
  DenseMatrix v = solve(lu, jinv_e.transpose()).transpose();
  // Exact symmetry for downstream factorizations.
  for (int s = 0; s < p; ++s)
    for (int t = s + 1; t < p; ++t) {
      const double m = 0.5 * (v(s, t) + v(t, s));
      v(s, t) = m;
      v(t, s) = m;
    }
  double scale = 0.0;
  for (int s = 0; s < p; ++s) scale = std::max(scale, std::fabs(v(s, s)));
  VarianceEstimate out;
  out.se.resize(p);
  for (int s = 0; s < p; ++s) {
    double d = v(s, s);
    if (d < 0.0) {
      if (d < -1e-12 * std::max(1.0, scale))
        throw NonFinite("sandwich variance has a negative diagonal entry");
      d = 0.0;
      v(s, s) = 0.0;
    }
    out.se[s] = std::sqrt(d);
  }
  out.vhat = std::move(v);
  return out;
}

PivotResult wald_pivot(const std::vector<double>& theta_tilde,
                       const std::vector<double>& theta0, const VarianceEstimate& v) {
  if (theta_tilde.size() != theta0.size())
    throw DimensionMismatch("wald_pivot: parameter vectors differ in length");
  const int p = static_cast<int>(theta_tilde.size());
  std::vector<double> delta(p);
  for (int s = 0; s < p; ++s) delta[s] = theta_tilde[s] - theta0[s];
  const std::vector<double> x = solve(lu_factor(v.vhat), delta);
  double w = 0.0;
  for (int s = 0; s < p; ++s) w += delta[s] * x[s];
  PivotResult r;
  r.statistic = w;
  r.df = p;
  r.pvalue = chisq_sf(w, p);
  return r;
}

PivotResult score_pivot(const EstimatingModel& m, const std::vector<double>& theta0,
                        const std::vector<double>& theta_tilde) {
  const AdjustmentMatrices at0 = assemble(m, theta0, true);
  const std::vector<double> adj = empirical_adjustment(at0);
  std::vector<double> g = at0.psi;
  for (size_t s = 0; s < g.size(); ++s) g[s] += adj[s];

  const AdjustmentMatrices at_tilde = assemble(m, theta_tilde, false);
  const std::vector<double> x = solve(lu_factor(at_tilde.e), g);
  double w = 0.0;
  for (size_t s = 0; s < g.size(); ++s) w += g[s] * x[s];
  PivotResult r;
  r.statistic = w;
  r.df = m.p;
  r.pvalue = chisq_sf(w, m.p);
  return r;
}

namespace {

CriterionValue trace_criterion(const EstimatingModel& m, const std::vector<double>& theta,
                               EvaluatedAt at, CriterionKind kind) {
  CriterionValue c;
  c.kind = kind;
  c.at = at;
  c.objective = objective_sum(m, theta);
  const AdjustmentMatrices mats = assemble(m, theta, false);
  c.penalty = trace(solve(lu_factor(mats.j), mats.e));
  c.minus_two = -2.0 * c.objective + 2.0 * c.penalty;
  c.larger_better = c.objective - c.penalty;
  return c;
}

}  // namespace

CriterionValue tic(const EstimatingModel& m, const std::vector<double>& theta, EvaluatedAt at) {
  return trace_criterion(m, theta, at, CriterionKind::TIC);
}

CriterionValue clic(const EstimatingModel& m, const std::vector<double>& theta, EvaluatedAt at) {
  return trace_criterion(m, theta, at, CriterionKind::CLIC);
}

CriterionValue aic(const EstimatingModel& m, const std::vector<double>& theta, EvaluatedAt at) {
  CriterionValue c;
  c.kind = CriterionKind::AIC;
  c.at = at;
  c.objective = objective_sum(m, theta);
  c.penalty = static_cast<double>(m.p);
  c.minus_two = -2.0 * c.objective + 2.0 * c.penalty;
  c.larger_better = c.objective - c.penalty;
  return c;
}

std::vector<double> criterion_weights(const std::vector<double>& minus_two_values) {
  if (minus_two_values.empty()) return {};
  const double cmin = *std::min_element(minus_two_values.begin(), minus_two_values.end());
  std::vector<double> w(minus_two_values.size());
  double total = 0.0;
  for (size_t k = 0; k < w.size(); ++k) {
    w[k] = std::exp(-0.5 * (minus_two_values[k] - cmin));
    total += w[k];
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace rbm
