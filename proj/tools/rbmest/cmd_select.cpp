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

#include <algorithm>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "cli_error.hpp"
#include "commands.hpp"
#include "rbmest/inference.hpp"
#include "rbmest/solver.hpp"

namespace rbmcli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct CandidateResult {
  std::string name;
  int p = 0;
  bool ok = false;
  std::string error;
  rbm::CriterionValue value;
  std::vector<double> theta;
};

// Classifies a candidate's failure for the report; candidates never abort
// the selection run.
std::string error_label(const rbm::Error& e) {
  return std::string(error_kind(e)) + ": " + e.what();
}

}  // namespace

int run_select(const SelectOptions& o) {
  if (o.criterion != "tic" && o.criterion != "aic" && o.criterion != "clic")
    throw CliError(kExitInput, "unknown criterion '" + o.criterion + "' (tic, aic, clic)");
  if (o.at != "m" && o.at != "rbm")
    throw CliError(kExitInput, "unknown evaluation point '" + o.at + "' (m or rbm)");

  const CsvTable table = read_csv_table(o.data_path);

  std::ifstream in(o.candidates_path, std::ios::binary);
  if (!in) throw CliError(kExitInput, "cannot open '" + o.candidates_path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError(kExitInput, o.candidates_path + ": " + e.what());
  }
  const json& list = doc.is_object() && doc.contains("candidates") ? doc["candidates"] : doc;
  if (!list.is_array() || list.empty())
    throw CliError(kExitInput, o.candidates_path + ": expected a non-empty candidates array");

  const rbm::EvaluatedAt at =
      o.at == "m" ? rbm::EvaluatedAt::MEstimate : rbm::EvaluatedAt::RbmEstimate;

  std::vector<CandidateResult> results(list.size());
  for (size_t k = 0; k < list.size(); ++k) {
    const std::string where = "/candidates/" + std::to_string(k);
    CandidateResult& r = results[k];
    r.name = "candidate_" + std::to_string(k);
    if (list[k].is_object() && list[k].contains("name") && list[k]["name"].is_string())
      r.name = list[k]["name"].get<std::string>();
    try {
      const ModelOptions opts = options_from_json(list[k], where);
      BuiltModel built = build_model(opts, table);
      r.p = built.model.p;
      rbm::SolverConfig cfg;
      cfg.keep_trace = false;
      const rbm::FitResult fit = o.at == "m" ? rbm::solve_m(built.model, cfg)
                                             : rbm::solve_rbm(built.model, cfg);
      if (!fit.converged) {
        r.error = "did not converge (residual " + std::to_string(fit.residual) + ")";
        continue;
      }
      r.theta = fit.theta;
      if (o.criterion == "tic") {
        r.value = rbm::tic(built.model, fit.theta, at);
      } else if (o.criterion == "aic") {
        r.value = rbm::aic(built.model, fit.theta, at);
      } else {
        r.value = rbm::clic(built.model, fit.theta, at);
      }
      r.ok = true;
    } catch (const CliError&) {
      throw;  // malformed candidate documents are input errors, not fit failures
    } catch (const rbm::Error& e) {
      r.error = error_label(e);
    }
  }

  // Criterion weights over the fitted candidates.
  std::vector<double> minus_two;
  std::vector<size_t> fitted;
  for (size_t k = 0; k < results.size(); ++k)
    if (results[k].ok) {
      minus_two.push_back(results[k].value.minus_two);
      fitted.push_back(k);
    }
  const std::vector<double> weights = rbm::criterion_weights(minus_two);

  // Ranking order: smaller criterion first; ties to fewer parameters, then
  // input order.
  std::vector<size_t> order = fitted;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (results[a].value.minus_two != results[b].value.minus_two)
      return results[a].value.minus_two < results[b].value.minus_two;
    if (results[a].p != results[b].p) return results[a].p < results[b].p;
    return a < b;
  });
  std::vector<int> rank(results.size(), 0);
  for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i) + 1;

  ordered_json report;
  report["command"] = "select";
  report["criterion"] = o.criterion;
  report["at"] = o.at;
  report["data"] = {{"path", o.data_path}, {"n", table.n()}};
  report["candidates"] = ordered_json::array();
  for (size_t k = 0; k < results.size(); ++k) {
    const CandidateResult& r = results[k];
    ordered_json c;
    c["name"] = r.name;
    if (!r.ok) {
      c["excluded"] = true;
      c["error"] = r.error;
      report["candidates"].push_back(std::move(c));
      continue;
    }
    c["p"] = r.p;
    c["estimates"] = r.theta;
    c["objective"] = r.value.objective;
    c["penalty"] = r.value.penalty;
    c["minus_two"] = r.value.minus_two;
    c["larger_better"] = r.value.larger_better;
    const size_t pos = static_cast<size_t>(
        std::find(fitted.begin(), fitted.end(), k) - fitted.begin());
    c["weight"] = weights[pos];
    c["rank"] = rank[k];
    c["best"] = !order.empty() && order.front() == k;
    report["candidates"].push_back(std::move(c));
  }
  report["best"] = order.empty() ? ordered_json(nullptr) : ordered_json(results[order.front()].name);
  report["excluded"] = static_cast<int>(results.size() - fitted.size());

  std::cout << report.dump(2) << "\n";
  return order.empty() ? kExitNumeric : kExitOk;
}

}  // namespace rbmcli
