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

#include "build.hpp"

#include <algorithm>

#include "cli_error.hpp"

namespace rbmcli {

namespace {

rbm::Family parse_family(const std::string& s) {
  if (s == "normal") return rbm::Family::Normal;
  if (s == "poisson") return rbm::Family::Poisson;
  if (s == "binomial") return rbm::Family::Binomial;
  if (s == "gamma") return rbm::Family::Gamma;
  throw CliError(kExitInput, "unknown family '" + s +
                                 "' (expected normal, poisson, binomial, or gamma)");
}

rbm::Link parse_link(const std::string& s) {
  if (s == "identity") return rbm::Link::Identity;
  if (s == "log") return rbm::Link::Log;
  if (s == "logit") return rbm::Link::Logit;
  if (s == "probit") return rbm::Link::Probit;
  throw CliError(kExitInput,
                 "unknown link '" + s + "' (expected identity, log, logit, or probit)");
}

rbm::Link default_link(rbm::Family f) {
  switch (f) {
    case rbm::Family::Normal: return rbm::Link::Identity;
    case rbm::Family::Poisson: return rbm::Link::Log;
    case rbm::Family::Binomial: return rbm::Link::Logit;
    case rbm::Family::Gamma: return rbm::Link::Log;
  }
  return rbm::Link::Identity;
}

rbm::VarianceFunction parse_varfun(const std::string& s) {
  if (s == "one") return rbm::VarianceFunction::One;
  if (s == "mu") return rbm::VarianceFunction::Mu;
  if (s == "mu2" || s == "mu^2") return rbm::VarianceFunction::MuSquared;
  if (s == "mu(1-mu)") return rbm::VarianceFunction::MuOneMinusMu;
  throw CliError(kExitInput, "unknown variance function '" + s +
                                 "' (expected one, mu, mu2, or mu(1-mu))");
}

const char* link_name(rbm::Link l) {
  switch (l) {
    case rbm::Link::Identity: return "identity";
    case rbm::Link::Log: return "log";
    case rbm::Link::Logit: return "logit";
    case rbm::Link::Probit: return "probit";
  }
  return "?";
}

// Design matrix, response, weights and the column-name bookkeeping shared by
// the glm and quasi builders.
struct RegressionData {
  rbm::DenseMatrix x;
  std::vector<double> y;
  std::vector<double> weights;
  std::vector<std::string> design_names;
  std::string response_name;
};

RegressionData regression_data(const ModelOptions& o, const CsvTable& t) {
  RegressionData out;
  const int y_col = o.response.empty() ? 0 : t.column_required(o.response);
  out.response_name = t.header[y_col];
  const int w_col = o.weight_column.empty() ? -1 : t.column_required(o.weight_column);
  if (w_col == y_col)
    throw CliError(kExitInput, "the weight column cannot be the response column");

  std::vector<int> cov_cols;
  if (o.covariates.empty() && !o.covariates_given) {
    for (int c = 0; c < static_cast<int>(t.header.size()); ++c)
      if (c != y_col && c != w_col) cov_cols.push_back(c);
  } else {
    for (const std::string& name : o.covariates) {
      const int c = t.column_required(name);
      if (c == y_col)
        throw CliError(kExitInput, "covariate '" + name + "' is the response column");
      cov_cols.push_back(c);
    }
  }

  const int n = t.n();
  const int p = static_cast<int>(cov_cols.size()) + (o.intercept ? 1 : 0);
  if (p == 0) throw CliError(kExitInput, "the design has no columns");
  out.x = rbm::DenseMatrix(n, p);
  int col = 0;
  if (o.intercept) {
    for (int i = 0; i < n; ++i) out.x(i, 0) = 1.0;
    out.design_names.push_back("(intercept)");
    col = 1;
  }
  for (int c : cov_cols) {
    for (int i = 0; i < n; ++i) out.x(i, col) = t.rows[i][c];
    out.design_names.push_back(t.header[c]);
    ++col;
  }
  out.y = t.values(y_col);
  if (w_col >= 0) out.weights = t.values(w_col);
  return out;
}

BuiltModel build_ratio(const CsvTable& t) {
  int x_col = t.column("x");
  int y_col = t.column("y");
  if (x_col < 0 || y_col < 0) {
    if (t.header.size() != 2)
      throw CliError(kExitInput,
                     t.path + ": the ratio model needs columns named x and y, or "
                              "exactly two columns");
    x_col = 0;
    y_col = 1;
  }
  BuiltModel out;
  rbm::RatioData data{t.values(x_col), t.values(y_col)};
  out.model = rbm::ratio_model(data);
  out.ratio = std::move(data);
  out.coord_names = {"theta"};
  out.spec_echo = {{"kind", "ratio"},
                   {"x_column", t.header[x_col]},
                   {"y_column", t.header[y_col]}};
  return out;
}

BuiltModel build_glm(const ModelOptions& o, const CsvTable& t) {
  rbm::GlmSpec spec;
  spec.family = parse_family(o.family);
  spec.link = o.link.empty() ? default_link(spec.family) : parse_link(o.link);
  if (o.dispersion == "known") {
    spec.dispersion = rbm::DispersionMode::Known;
  } else if (o.dispersion == "unknown") {
    spec.dispersion = rbm::DispersionMode::Unknown;
  } else {
    throw CliError(kExitInput,
                   "unknown dispersion mode '" + o.dispersion + "' (known or unknown)");
  }
  spec.phi = o.phi;

  RegressionData data = regression_data(o, t);
  spec.x = std::move(data.x);
  spec.y = std::move(data.y);
  spec.weights = std::move(data.weights);

  BuiltModel out;
  out.model = rbm::glm_model(spec);
  out.coord_names = data.design_names;
  if (spec.dispersion == rbm::DispersionMode::Unknown) out.coord_names.push_back("phi");
  out.spec_echo = {{"kind", "glm"},
                   {"family", o.family},
                   {"link", link_name(spec.link)},
                   {"dispersion", o.dispersion},
                   {"response", data.response_name},
                   {"design", nlohmann::ordered_json::array()}};
  for (const std::string& name : data.design_names) out.spec_echo["design"].push_back(name);
  if (spec.dispersion == rbm::DispersionMode::Known) out.spec_echo["phi"] = spec.phi;
  out.glm = std::move(spec);
  return out;
}

BuiltModel build_quasi(const ModelOptions& o, const CsvTable& t) {
  rbm::QuasiSpec spec;
  spec.link = o.link.empty() ? rbm::Link::Identity : parse_link(o.link);
  spec.varfun = parse_varfun(o.varfun);
  if (o.quasi_mode == "moment") {
    spec.mode = rbm::QuasiMode::MomentPhi;
  } else if (o.quasi_mode == "joint") {
    spec.mode = rbm::QuasiMode::AdjustedJointPhi;
  } else {
    throw CliError(kExitInput,
                   "unknown quasi mode '" + o.quasi_mode + "' (moment or joint)");
  }
  spec.moment_r = o.moment_r;

  RegressionData data = regression_data(o, t);
  spec.x = std::move(data.x);
  spec.y = std::move(data.y);
  spec.weights = std::move(data.weights);

  BuiltModel out;
  out.model = rbm::quasi_model(spec);
  out.coord_names = data.design_names;
  if (spec.mode == rbm::QuasiMode::AdjustedJointPhi) out.coord_names.push_back("phi");
  out.spec_echo = {{"kind", "quasi"},
                   {"link", link_name(spec.link)},
                   {"variance_function", o.varfun},
                   {"mode", o.quasi_mode},
                   {"response", data.response_name},
                   {"design", nlohmann::ordered_json::array()}};
  for (const std::string& name : data.design_names) out.spec_echo["design"].push_back(name);
  out.quasi = std::move(spec);
  return out;
}

}  // namespace

BuiltModel build_model(const ModelOptions& o, const CsvTable& t) {
  if (o.model == "ratio") return build_ratio(t);
  if (o.model == "glm") return build_glm(o, t);
  if (o.model == "quasi") return build_quasi(o, t);
  throw CliError(kExitInput,
                 "unknown model kind '" + o.model + "' (expected ratio, glm, or quasi)");
}

ModelOptions options_from_json(const nlohmann::json& c, const std::string& where) {
  if (!c.is_object()) throw CliError(kExitInput, where + ": expected an object");
  ModelOptions o;
  const auto str = [&](const char* key, std::string* dst) {
    if (!c.contains(key)) return;
    if (!c[key].is_string())
      throw CliError(kExitInput, where + "/" + key + ": expected a string");
    *dst = c[key].get<std::string>();
  };
  if (!c.contains("model") || !c["model"].is_string())
    throw CliError(kExitInput, where + "/model: required string (ratio, glm, or quasi)");
  o.model = c["model"].get<std::string>();
  str("family", &o.family);
  str("link", &o.link);
  str("varfun", &o.varfun);
  str("dispersion", &o.dispersion);
  str("quasi_mode", &o.quasi_mode);
  str("response", &o.response);
  str("weight_column", &o.weight_column);
  if (c.contains("phi")) {
    if (!c["phi"].is_number()) throw CliError(kExitInput, where + "/phi: expected a number");
    o.phi = c["phi"].get<double>();
  }
  if (c.contains("moment_r")) {
    if (!c["moment_r"].is_number_integer())
      throw CliError(kExitInput, where + "/moment_r: expected an integer");
    o.moment_r = c["moment_r"].get<int>();
  }
  if (c.contains("intercept")) {
    if (!c["intercept"].is_boolean())
      throw CliError(kExitInput, where + "/intercept: expected a boolean");
    o.intercept = c["intercept"].get<bool>();
  }
  if (c.contains("covariates")) {
    if (!c["covariates"].is_array())
      throw CliError(kExitInput, where + "/covariates: expected an array of column names");
    o.covariates_given = true;
    for (size_t i = 0; i < c["covariates"].size(); ++i) {
      if (!c["covariates"][i].is_string())
        throw CliError(kExitInput,
                       where + "/covariates/" + std::to_string(i) + ": expected a string");
      o.covariates.push_back(c["covariates"][i].get<std::string>());
    }
  }
  return o;
}

}  // namespace rbmcli
