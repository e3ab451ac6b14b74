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

#include <cmath>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

#include "cli_error.hpp"
#include "commands.hpp"
#include "rbmest/adjustment.hpp"
#include "rbmest/inference.hpp"
#include "rbmest/solver.hpp"

namespace rbmcli {

namespace {

using nlohmann::ordered_json;

double adjusted_residual(const rbm::EstimatingModel& m, const std::vector<double>& theta) {
  try {
    const rbm::AdjustmentMatrices mats = rbm::assemble(m, theta, true);
    const std::vector<double> a = rbm::empirical_adjustment(mats);
    double norm = 0.0;
    for (size_t s = 0; s < a.size(); ++s) norm += std::fabs(mats.psi[s] + a[s]);
    return norm;
  } catch (const rbm::Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

ordered_json criterion_block(const rbm::CriterionValue& c) {
  return {{"objective", c.objective},
          {"penalty", c.penalty},
          {"minus_two", c.minus_two},
          {"larger_better", c.larger_better}};
}

ordered_json pivot_block(const rbm::PivotResult& p) {
  return {{"statistic", p.statistic}, {"df", p.df}, {"pvalue", p.pvalue}};
}

}  // namespace

int run_fit(const FitOptions& o) {
  const CsvTable table = read_csv_table(o.data_path);
  BuiltModel built = build_model(o.model, table);
  const rbm::EstimatingModel& m = built.model;

  if (o.estimator != "m" && o.estimator != "rbm" && o.estimator != "onestep" &&
      o.estimator != "penalized" && o.estimator != "logdet-penalized")
    throw CliError(kExitInput, "unknown estimator '" + o.estimator +
                                   "' (m, rbm, onestep, penalized, logdet-penalized)");

  rbm::SolverConfig cfg;
  if (o.epsilon > 0.0) cfg.epsilon = o.epsilon;
  if (o.max_iter > 0) cfg.max_iter = o.max_iter;
  if (!o.start.empty()) {
    if (static_cast<int>(o.start.size()) != m.p)
      throw CliError(kExitInput, "--start needs " + std::to_string(m.p) + " values, got " +
                                     std::to_string(o.start.size()));
    cfg.start = o.start;
    cfg.start_from_m = false;
  }
  if (!o.null_values.empty() && static_cast<int>(o.null_values.size()) != m.p)
    throw CliError(kExitInput, "--null needs " + std::to_string(m.p) + " values, got " +
                                   std::to_string(o.null_values.size()));

  rbm::FitResult fit;
  if (o.estimator == "m") {
    fit = rbm::solve_m(m, cfg);
  } else if (o.estimator == "rbm") {
    fit = rbm::solve_rbm(m, cfg);
  } else if (o.estimator == "onestep") {
    fit = rbm::solve_m(m, cfg);
    fit.theta = rbm::one_step(m, fit.theta);
    fit.residual = adjusted_residual(m, fit.theta);
    fit.trace.clear();
  } else {
    const rbm::PenaltyVariant variant = o.estimator == "penalized"
                                            ? rbm::PenaltyVariant::HalfTrace
                                            : rbm::PenaltyVariant::LogDet;
    fit = rbm::maximize_penalized(m, cfg, variant);
  }

  const rbm::AdjustmentMatrices mats = rbm::assemble(m, fit.theta, false);
  const rbm::VarianceEstimate v = rbm::sandwich(mats);

  ordered_json report;
  report["command"] = "fit";
  report["data"] = {{"path", o.data_path}, {"n", table.n()}};
  report["model"] = built.spec_echo;
  report["estimator"] = o.estimator;
  report["coefficients"] = ordered_json::array();
  for (int s = 0; s < m.p; ++s)
    report["coefficients"].push_back(
        {{"name", built.coord_names[s]}, {"estimate", fit.theta[s]}, {"se", v.se[s]}});
  report["estimates"] = fit.theta;
  report["se"] = v.se;
  report["vcov"] = ordered_json::array();
  for (int r = 0; r < m.p; ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.p; ++c) row.push_back(v.vhat(r, c));
    report["vcov"].push_back(std::move(row));
  }
  report["convergence"] = {{"converged", fit.converged},
                           {"iterations", fit.iterations},
                           {"residual", fit.residual}};

  if (m.flavor == rbm::ModelFlavor::ObjectiveGradient) {
    const rbm::EvaluatedAt at = o.estimator == "m" ? rbm::EvaluatedAt::MEstimate
                                                   : rbm::EvaluatedAt::RbmEstimate;
    report["criteria"] = {{"evaluated_at", o.estimator == "m" ? "m" : "rbm"},
                          {"tic", criterion_block(rbm::tic(m, fit.theta, at))},
                          {"aic", criterion_block(rbm::aic(m, fit.theta, at))},
                          {"clic", criterion_block(rbm::clic(m, fit.theta, at))}};
  } else {
    report["criteria"] = nullptr;
  }

  if (built.glm) {
    if (built.glm->dispersion == rbm::DispersionMode::Known)
      report["dispersion"] = {{"method", "fixed"}, {"phi", built.glm->phi}};
    else
      report["dispersion"] = {{"method", "estimated"}, {"phi", fit.theta[m.p - 1]}};
  } else if (built.quasi) {
    if (built.quasi->mode == rbm::QuasiMode::MomentPhi) {
      const int divisor = built.quasi->moment_r > 0
                              ? built.quasi->moment_r
                              : table.n() - m.p;
      report["dispersion"] = {
          {"method", "pearson_moment"},
          {"divisor", divisor},
          {"phi", rbm::quasi_phi_moment(*built.quasi, fit.theta, built.quasi->moment_r)}};
    } else {
      report["dispersion"] = {{"method", "joint"}, {"phi", fit.theta[m.p - 1]}};
    }
  }

  if (!o.null_values.empty()) {
    report["pivots"] = {{"null", o.null_values},
                        {"wald", pivot_block(rbm::wald_pivot(fit.theta, o.null_values, v))},
                        {"score", pivot_block(rbm::score_pivot(m, o.null_values, fit.theta))}};
  }

  std::cout << report.dump(2) << "\n";
  return fit.converged ? kExitOk : kExitNumeric;
}

}  // namespace rbmcli
