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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "cli_error.hpp"
#include "commands.hpp"
#include "rbmest/simulate.hpp"

namespace rbmcli {

namespace {

using nlohmann::json;

// Converts and validates the design document. Error messages carry the
// JSON-pointer path of the offending value.
rbm::SimDesign design_from_json(const json& j) {
  if (!j.is_object()) throw CliError(kExitInput, "design error at /: expected an object");
  static const char* known[] = {"kind",       "sample_sizes", "replications", "rule",
                                "seed",       "estimators",   "threads",      "negbin_varfun"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw CliError(kExitInput, "design error at /" + key + ": unknown field");
  }

  rbm::SimDesign d;
  if (!j.contains("kind") || !j["kind"].is_string())
    throw CliError(kExitInput, "design error at /kind: required string");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "ratio_copula") {
    d.kind = rbm::DesignKind::RatioCopula;
  } else if (kind == "probit_study") {
    d.kind = rbm::DesignKind::ProbitStudy;
  } else if (kind == "negbin_quasi") {
    d.kind = rbm::DesignKind::NegBinQuasi;
  } else {
    throw CliError(kExitInput, "design error at /kind: unknown design kind '" + kind +
                                   "' (ratio_copula, probit_study, negbin_quasi)");
  }

  if (!j.contains("sample_sizes") || !j["sample_sizes"].is_array() || j["sample_sizes"].empty())
    throw CliError(kExitInput,
                   "design error at /sample_sizes: required non-empty array of integers");
  for (size_t i = 0; i < j["sample_sizes"].size(); ++i) {
    if (!j["sample_sizes"][i].is_number_integer())
      throw CliError(kExitInput, "design error at /sample_sizes/" + std::to_string(i) +
                                     ": expected an integer");
    d.sample_sizes.push_back(j["sample_sizes"][i].get<int>());
  }

  if (!j.contains("replications") || !j["replications"].is_number_integer())
    throw CliError(kExitInput, "design error at /replications: required integer");
  d.replications = j["replications"].get<long long>();

  if (j.contains("rule")) {
    if (!j["rule"].is_string())
      throw CliError(kExitInput, "design error at /rule: expected a string");
    const std::string rule = j["rule"].get<std::string>();
    if (rule == "fixed") {
      d.rule = rbm::ReplicationRule::Fixed;
    } else if (rule == "inverse_n") {
      d.rule = rbm::ReplicationRule::InverseN;
    } else if (rule == "doubling") {
      d.rule = rbm::ReplicationRule::Doubling;
    } else {
      throw CliError(kExitInput, "design error at /rule: unknown rule '" + rule +
                                     "' (fixed, inverse_n, doubling)");
    }
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() ||
        (!j["seed"].is_number_unsigned() && j["seed"].get<long long>() < 0))
      throw CliError(kExitInput, "design error at /seed: expected a non-negative integer");
    d.seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("estimators")) {
    if (!j["estimators"].is_array())
      throw CliError(kExitInput, "design error at /estimators: expected an array of strings");
    for (size_t i = 0; i < j["estimators"].size(); ++i) {
      if (!j["estimators"][i].is_string())
        throw CliError(kExitInput, "design error at /estimators/" + std::to_string(i) +
                                       ": expected a string");
      d.estimators.push_back(j["estimators"][i].get<std::string>());
    }
  }

  if (j.contains("threads")) {
    if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 1)
      throw CliError(kExitInput, "design error at /threads: expected an integer >= 1");
    d.threads = j["threads"].get<int>();
  }

  if (j.contains("negbin_varfun")) {
    if (!j["negbin_varfun"].is_string())
      throw CliError(kExitInput, "design error at /negbin_varfun: expected a string");
    const std::string v = j["negbin_varfun"].get<std::string>();
    if (v == "mu") {
      d.negbin_varfun = rbm::VarianceFunction::Mu;
    } else if (v == "mu2") {
      d.negbin_varfun = rbm::VarianceFunction::MuSquared;
    } else {
      throw CliError(kExitInput,
                     "design error at /negbin_varfun: unknown value '" + v + "' (mu, mu2)");
    }
  }
  return d;
}

std::uint64_t seed_from_env(const char* text) {
  std::uint64_t value = 0;
  if (*text == '\0') throw CliError(kExitInput, "RBM_SEED is empty");
  for (const char* p = text; *p; ++p) {
    if (*p < '0' || *p > '9')
      throw CliError(kExitInput, std::string("RBM_SEED must be a decimal integer, got '") +
                                     text + "'");
    value = value * 10u + static_cast<std::uint64_t>(*p - '0');
  }
  return value;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(kExitInput, "cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

int run_simulate(const SimulateOptions& o) {
  std::ifstream in(o.design_path, std::ios::binary);
  if (!in) throw CliError(kExitInput, "cannot open '" + o.design_path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError(kExitInput, o.design_path + ": " + e.what());
  }

  rbm::SimDesign design = design_from_json(doc);
  if (const char* env_seed = std::getenv("RBM_SEED")) design.seed = seed_from_env(env_seed);
  if (o.threads > 0) design.threads = o.threads;

  rbm::StudyHooks hooks;
  hooks.progress = [](int n, long long completed) {
    std::cerr << "n=" << n << ": " << completed << " replications done\n";
  };
  const rbm::SimSummary summary = rbm::run_study(design, &hooks);

  const std::filesystem::path out_dir(o.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw CliError(kExitInput, "cannot create '" + out_dir.string() + "': " + ec.message());
  write_file(out_dir / "summary.json", rbm::summary_to_json(summary));
  write_file(out_dir / "summary.csv", rbm::summary_to_csv(summary));
  std::cerr << "wrote " << (out_dir / "summary.json").string() << " and "
            << (out_dir / "summary.csv").string() << "\n";
  return kExitOk;
}

}  // namespace rbmcli
