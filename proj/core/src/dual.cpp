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

#include "rbmest/dual.hpp"

namespace rbm {

std::vector<Dual2> lift_params(const std::vector<double>& theta) {
  const int p = static_cast<int>(theta.size());
  if (p == 0) throw EmptyParameter("lift_params with an empty parameter vector");
  std::vector<Dual2> out;
  out.reserve(p);
  for (int s = 0; s < p; ++s) {
    Dual2 d(p, theta[s]);
    d.g()[s] = 1.0;
    out.push_back(std::move(d));
  }
  return out;
}

ScalarDerivatives eval_with_derivs(
    const std::function<Dual2(std::span<const Dual2>)>& f,
    const std::vector<double>& theta) {
  const std::vector<Dual2> lifted = lift_params(theta);
  const Dual2 r = f(std::span<const Dual2>(lifted.data(), lifted.size()));
  const int p = static_cast<int>(theta.size());
  if (r.dim() != p) throw DimensionMismatch("function result carries a different dim");
  ScalarDerivatives out;
  out.value = r.value();
  out.grad.assign(r.g(), r.g() + p);
  out.hess = DenseMatrix(p, p);
  for (int s = 0; s < p; ++s)
    for (int t = 0; t < p; ++t) out.hess(s, t) = r.hess(s, t);
  return out;
}

}  // namespace rbm
