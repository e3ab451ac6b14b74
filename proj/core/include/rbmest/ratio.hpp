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

#ifndef RBMEST_RATIO_HPP
#define RBMEST_RATIO_HPP

#include <vector>

#include "rbmest/model.hpp"

namespace rbm {

// Ratio-of-means data: psi^i(theta) = y_i - theta x_i.
struct RatioData {
  std::vector<double> x;
  std::vector<double> y;
};

EstimatingModel ratio_model(const RatioData& data);

// Closed forms. Everything below reduces to the data sums
// s_X, s_Y, s_XX, s_XY, s_YY.
double ratio_m_estimate(const RatioData& data);           // s_Y / s_X
double ratio_rbm_estimate(const RatioData& data);         // (s_Y s_X + s_XY) / (s_X^2 + s_XX)
double ratio_one_step(const RatioData& data);             // theta_hat (1 - s_XX/s_X^2) + s_XY/s_X^2
double ratio_jackknife(const RatioData& data);            // n theta_hat - (n-1)/n sum leave-one-out
double ratio_adjustment(const RatioData& data, double theta);  // s_XY/s_X - theta s_XX/s_X
double ratio_sandwich(const RatioData& data, double theta);    // e(theta) / s_X^2

}  // namespace rbm

#endif  // RBMEST_RATIO_HPP
