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

#ifndef RBMEST_TOOLS_BUILD_HPP
#define RBMEST_TOOLS_BUILD_HPP

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "csv.hpp"
#include "rbmest/glm.hpp"
#include "rbmest/quasi.hpp"
#include "rbmest/ratio.hpp"

namespace rbmcli {

// Everything needed to turn CSV columns into one of the built-in models.
// The same options are populated from command-line flags (fit) and from
// candidate JSON objects (select).
struct ModelOptions {
  std::string model;  // "ratio" | "glm" | "quasi"
  // glm
  std::string family = "normal";  // normal | poisson | binomial | gamma
  std::string link;               // empty picks the family default
  std::string dispersion = "known";
  double phi = 1.0;
  // quasi
  std::string varfun = "one";  // one | mu | mu2 | mu(1-mu)
  std::string quasi_mode = "moment";
  int moment_r = -1;
  // column selection
  std::string response;                 // default: first column
  std::vector<std::string> covariates;  // when not given: every remaining column
  bool covariates_given = false;        // an explicit empty list means intercept-only
  std::string weight_column;
  bool intercept = true;
};

struct BuiltModel {
  rbm::EstimatingModel model;
  std::vector<std::string> coord_names;  // one per parameter
  nlohmann::ordered_json spec_echo;      // the "model" block of reports
  std::optional<rbm::GlmSpec> glm;
  std::optional<rbm::QuasiSpec> quasi;
  std::optional<rbm::RatioData> ratio;
};

// Parses the enum-like option strings (CliError on unknown values) and
// assembles the model from the table. Ratio data come from columns named
// x and y, or from the first two columns when those names are absent.
BuiltModel build_model(const ModelOptions& options, const CsvTable& data);

// Candidate objects in a selection file carry the same fields as the fit
// flags: model, family, link, varfun, dispersion, phi, quasi_mode, moment_r,
// response, covariates, weight_column, intercept, plus an optional name.
ModelOptions options_from_json(const nlohmann::json& candidate, const std::string& where);

}  // namespace rbmcli

#endif  // RBMEST_TOOLS_BUILD_HPP
