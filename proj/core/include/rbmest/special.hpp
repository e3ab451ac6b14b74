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

#ifndef RBMEST_SPECIAL_HPP
#define RBMEST_SPECIAL_HPP

namespace rbm {

double normal_pdf(double x);
// Phi(x) through erfc; good to full double precision in both tails.
double normal_cdf(double x);
// Wichura's AS 241 (PPND16) inverse normal; p in (0,1).
double normal_quantile(double p);

// psi and psi' for x > 0 (recurrence up to x >= 10, then asymptotic series).
double digamma(double x);
double trigamma(double x);

// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x), a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Smallest x with P(a, x) >= u, by doubling bracket + bisection. u in [0,1).
double gamma_p_inverse(double a, double u);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chisq_sf(double x, double df);

}  // namespace rbm

#endif  // RBMEST_SPECIAL_HPP
