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

#include "rbmest/adjustment.hpp"

namespace rbm {

std::vector<double> empirical_adjustment(const AdjustmentMatrices& mats) {
  if (!mats.has_second)
    throw FlavorMismatch("empirical_adjustment needs second-order blocks (assemble with need_second)");
  const int p = static_cast<int>(mats.psi.size());
  const LuFactorization lu = lu_factor(mats.j);
  // V = j^-1 e j^-T, shared by every component.
  const DenseMatrix jinv_e = solve(lu, mats.e);
  const DenseMatrix v = solve(lu, jinv_e.transpose()).transpose();
  std::vector<double> a(p);
  for (int r = 0; r < p; ++r) {
    const double t1 = trace(solve(lu, mats.d[r]));
    const double t2 = trace_of_product(v, mats.u[r]);
    a[r] = -t1 - 0.5 * t2;
  }
  return a;
}

double penalized_objective(const EstimatingModel& m, const std::vector<double>& theta) {
  if (m.flavor != ModelFlavor::ObjectiveGradient)
    throw FlavorMismatch("penalized_objective needs an ObjectiveGradient model");
  const double value = objective_sum(m, theta);
  const AdjustmentMatrices mats = assemble(m, theta, false);
  const LuFactorization lu = lu_factor(mats.j);
  return value - 0.5 * trace(solve(lu, mats.e));
}

double penalized_objective_logdet(const EstimatingModel& m, const std::vector<double>& theta) {
  if (m.flavor != ModelFlavor::ObjectiveGradient)
    throw FlavorMismatch("penalized_objective_logdet needs an ObjectiveGradient model");
  const double value = objective_sum(m, theta);
  const AdjustmentMatrices mats = assemble(m, theta, false);
  return value + 0.5 * log_abs_det(lu_factor(mats.j)) - 0.5 * log_abs_det(lu_factor(mats.e));
}

std::vector<double> one_step(const EstimatingModel& m, const std::vector<double>& theta_hat) {
  const AdjustmentMatrices mats = assemble(m, theta_hat, true);
  const std::vector<double> a = empirical_adjustment(mats);
  const std::vector<double> delta = solve(lu_factor(mats.j), a);
  std::vector<double> out = theta_hat;
  for (size_t s = 0; s < out.size(); ++s) out[s] += delta[s];
  return out;
}

const AdjustedSystem::State& AdjustedSystem::at(const std::vector<double>& theta) {
  if (cache_ && cache_->theta == theta) return *cache_;
  State st;
  st.theta = theta;
  st.mats = assemble(*model_, theta, true);
  st.adjustment = empirical_adjustment(st.mats);
  st.adjusted_psi = st.mats.psi;
  for (size_t s = 0; s < st.adjusted_psi.size(); ++s) st.adjusted_psi[s] += st.adjustment[s];
  cache_ = std::move(st);
  return *cache_;
}

}  // namespace rbm
