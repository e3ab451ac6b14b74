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

#include "rbmest/ratio.hpp"

namespace rbm {

namespace {

struct Sums {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
};

Sums sums_of(const RatioData& d) {
  if (d.x.size() != d.y.size()) throw DimensionMismatch("ratio data: |x| != |y|");
  if (d.x.empty()) throw DegenerateData("ratio data is empty");
  Sums s;
  s.n = static_cast<int>(d.x.size());
  for (int i = 0; i < s.n; ++i) {
    s.sx += d.x[i];
    s.sy += d.y[i];
    s.sxx += d.x[i] * d.x[i];
    s.sxy += d.x[i] * d.y[i];
    s.syy += d.y[i] * d.y[i];
  }
  return s;
}

}  // namespace

EstimatingModel ratio_model(const RatioData& data) {
  const Sums s = sums_of(data);
  EstimatingModel m;
  m.flavor = ModelFlavor::VectorPsi;
  m.k = s.n;
  m.p = 1;
  // Copy the data into the closures so the model owns what it evaluates.
  auto x = data.x;
  auto y = data.y;
  m.psi = [x, y](int i, std::span<const Dual2> theta, std::span<Dual2> out) {
    out[0] = y[i] - theta[0] * x[i];
  };
  m.psi_value = [x, y](int i, std::span<const double> theta, std::span<double> out) {
    out[0] = y[i] - theta[0] * x[i];
  };
  m.start = {s.sx != 0.0 ? s.sy / s.sx : 0.0};
  return m;
}

double ratio_m_estimate(const RatioData& data) {
  const Sums s = sums_of(data);
  if (s.sx == 0.0) throw DegenerateData("ratio M-estimate: s_X is zero");
  return s.sy / s.sx;
}

double ratio_rbm_estimate(const RatioData& data) {
  const Sums s = sums_of(data);
  // (s_Y + s_XY/s_X) / (s_X + s_XX/s_X), cleared of the 1/s_X factors.
  const double denom = s.sx * s.sx + s.sxx;
  if (denom == 0.0) throw DegenerateData("ratio RBM estimate: zero denominator");
  return (s.sy * s.sx + s.sxy) / denom;
}

double ratio_one_step(const RatioData& data) {
  const Sums s = sums_of(data);
  if (s.sx == 0.0) throw DegenerateData("ratio one-step: s_X is zero");
  const double theta_hat = s.sy / s.sx;
  return theta_hat * (1.0 - s.sxx / (s.sx * s.sx)) + s.sxy / (s.sx * s.sx);
}

double ratio_jackknife(const RatioData& data) {
  const Sums s = sums_of(data);
  if (s.n < 2) throw DegenerateData("ratio jackknife needs n >= 2");
  if (s.sx == 0.0) throw DegenerateData("ratio jackknife: s_X is zero");
  const double theta_hat = s.sy / s.sx;
  double loo_sum = 0.0;
  for (int i = 0; i < s.n; ++i) {
    const double dx = s.sx - data.x[i];
    if (dx == 0.0) throw DegenerateData("ratio jackknife: a leave-one-out s_X is zero");
    loo_sum += (s.sy - data.y[i]) / dx;
  }
  return s.n * theta_hat - (s.n - 1.0) / s.n * loo_sum;
}

double ratio_adjustment(const RatioData& data, double theta) {
  const Sums s = sums_of(data);
  if (s.sx == 0.0) throw DegenerateData("ratio adjustment: s_X is zero");
  return s.sxy / s.sx - theta * s.sxx / s.sx;
}

double ratio_sandwich(const RatioData& data, double theta) {
  const Sums s = sums_of(data);
  if (s.sx == 0.0) throw DegenerateData("ratio sandwich: s_X is zero");
  const double e = s.syy + theta * theta * s.sxx - 2.0 * theta * s.sxy;
  return e / (s.sx * s.sx);
}

}  // namespace rbm
