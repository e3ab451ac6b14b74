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

#ifndef RBMEST_SIMULATE_HPP
#define RBMEST_SIMULATE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rbmest/matrix.hpp"
#include "rbmest/quasi.hpp"
#include "rbmest/ratio.hpp"
#include "rbmest/rng.hpp"

namespace rbm {

// The three built-in study designs. RatioCopula compares the closed-form
// ratio estimators; ProbitStudy compares maximum likelihood with the
// reduced-bias fit on a five-covariate binary probit; NegBinQuasi fits the
// joint quasi-likelihood system to overdispersed counts.
enum class DesignKind { RatioCopula, ProbitStudy, NegBinQuasi };

// How the replication count at the r-th sample size is derived from the
// `replications` field: a fixed count, count/n, or count * 2^r.
enum class ReplicationRule { Fixed, InverseN, Doubling };

struct SimDesign {
  DesignKind kind = DesignKind::RatioCopula;
  std::vector<int> sample_sizes;       // strictly increasing
  ReplicationRule rule = ReplicationRule::Fixed;
  long long replications = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> estimators; // empty = design defaults
  int threads = 1;                     // never affects the results
  // NegBinQuasi working variance; MuSquared gives the misspecified study.
  VarianceFunction negbin_varfun = VarianceFunction::Mu;
};

long long replications_at(const SimDesign& design, int n_index);

// --- data generators (public so their moments can be tested directly) ---

// Dependent positive pairs through a Gaussian copula: Z1, Z2 standard normal
// with the given correlation, X = -2 log(1 - Phi(Z1)) (exponential, mean 2),
// Y = 10 + Z2. True ratio E(Y)/E(X) = 5.
RatioData gen_ratio_copula(int n, Philox4x32& rng, double rho = 0.5);

// Columns: intercept, N(0,1), Bernoulli(1/4), Bernoulli(3/4), Exp(1). The
// study holds one realization fixed across replications.
DenseMatrix gen_probit_design(int n, Philox4x32& rng);
std::vector<double> gen_probit_response(const DenseMatrix& x, const std::vector<double>& beta,
                                        Philox4x32& rng);

// Columns: intercept, Bernoulli(1/2), Exp(2). The study draws one block at
// the smallest sample size and tiles it across the ladder, holding it fixed
// over replications.
DenseMatrix gen_negbin_design(int n, Philox4x32& rng);
// Gamma-Poisson counts with mean mu = exp(x beta) and variance phi * mu
// (negative binomial with size mu/(phi-1) and success probability 1/phi).
std::vector<double> gen_negbin(const DenseMatrix& x, const std::vector<double>& beta,
                               double phi, Philox4x32& rng);

// --- study output ---

// Per-(estimator, sample size) summaries; one entry per coordinate. Monte
// Carlo standard errors are sample SD / sqrt(successes) and NaN when fewer
// than two replications succeeded (serialized as null).
struct CellStats {
  long long replications = 0;
  long long failures = 0;
  std::vector<double> bias, mse, mae, pu, variance, mean_vhat;
  std::vector<double> bias_se, mse_se, mae_se, pu_se;
};

struct SimSummary {
  DesignKind kind = DesignKind::RatioCopula;
  std::uint64_t seed = 0;
  ReplicationRule rule = ReplicationRule::Fixed;
  long long replications = 0;
  std::vector<int> sample_sizes;
  std::vector<std::string> estimators;
  std::vector<std::string> coord_names;
  std::vector<double> truth;
  std::vector<std::vector<CellStats>> cells;  // [estimator][n index]
  std::vector<std::vector<double>> slopes;    // [estimator][coord]: OLS slope of
                                              // log|bias| on log n (NaN if undefined)
};

// Test seams and progress reporting; all optional.
struct StudyHooks {
  std::function<RatioData(int n, Philox4x32& rng)> ratio_generator;
  std::function<void(int n, long long completed)> progress;
};

// Runs every replication at every sample size and aggregates in replication
// order. Per-replication RNG streams are derived from (seed, sample-size
// index, replication index) only, so the output is identical for any worker
// count. Estimator failures (non-convergence, degenerate data, singular
// systems) are counted, excluded from the moment summaries, and never abort
// the study.
SimSummary run_study(const SimDesign& design, const StudyHooks* hooks = nullptr);

// Deterministic serializations (non-finite values become null / empty cells).
std::string summary_to_json(const SimSummary& summary);
std::string summary_to_csv(const SimSummary& summary);

}  // namespace rbm

#endif  // RBMEST_SIMULATE_HPP
