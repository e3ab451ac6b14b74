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

#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <json.hpp>

#include "cli_error.hpp"
#include "commands.hpp"

namespace {

int guarded(const std::function<int()>& command) {
  try {
    return command();
  } catch (const rbmcli::CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const rbm::Error& e) {
    std::cerr << "error: " << rbmcli::error_kind(e) << ": " << e.what() << "\n";
    return rbmcli::error_exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rbmcli::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return rbmcli::kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-bias M-estimation: fit models, run simulation studies, "
               "select models by information criteria"};
  app.require_subcommand(1);

  rbmcli::FitOptions fit;
  CLI::App* cmd_fit = app.add_subcommand("fit", "Fit a built-in model to CSV data");
  cmd_fit->add_option("--model", fit.model.model, "Model kind: ratio, glm, quasi")
      ->required();
  cmd_fit->add_option("--estimator", fit.estimator,
                      "m, rbm, onestep, penalized, logdet-penalized (default rbm)");
  cmd_fit->add_option("--data", fit.data_path, "CSV file with a header row")->required();
  cmd_fit->add_option("--family", fit.model.family,
                      "GLM family: normal, poisson, binomial, gamma");
  cmd_fit->add_option("--link", fit.model.link,
                      "identity, log, logit, probit (default: family's canonical link)");
  cmd_fit->add_option("--varfun", fit.model.varfun,
                      "Quasi variance function: one, mu, mu2, mu(1-mu)");
  cmd_fit->add_option("--dispersion", fit.model.dispersion, "GLM dispersion: known, unknown");
  cmd_fit->add_option("--phi", fit.model.phi, "Dispersion value when known (default 1)");
  cmd_fit->add_option("--quasi-mode", fit.model.quasi_mode,
                      "moment (Pearson phi after the fit) or joint");
  cmd_fit->add_option("--moment-r", fit.model.moment_r,
                      "Pearson divisor R (default n - p)");
  cmd_fit->add_option("--response", fit.model.response,
                      "Response column (default: first column)");
  cmd_fit->add_option("--covariates", fit.model.covariates,
                      "Covariate columns (default: every remaining column)")
      ->delimiter(',');
  cmd_fit->add_option("--weight-column", fit.model.weight_column, "Prior-weight column");
  cmd_fit->add_flag_callback("--no-intercept", [&fit] { fit.model.intercept = false; },
                             "Do not prepend an intercept column");
  cmd_fit->add_option("--epsilon", fit.epsilon, "Solver stopping threshold");
  cmd_fit->add_option("--max-iter", fit.max_iter, "Solver iteration cap");
  cmd_fit->add_option("--start", fit.start, "Starting values v1,v2,...")->delimiter(',');
  cmd_fit->add_option("--null", fit.null_values,
                      "Null parameter values for Wald/score pivots")
      ->delimiter(',');

  rbmcli::SimulateOptions sim;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "Run a seeded simulation study");
  cmd_sim->add_option("--design", sim.design_path, "Design JSON file")->required();
  cmd_sim->add_option("--out", sim.out_dir, "Output directory for summary.json/.csv")
      ->required();
  cmd_sim->add_option("--threads", sim.threads,
                      "Worker threads (never changes the results)");

  rbmcli::SelectOptions sel;
  CLI::App* cmd_sel = app.add_subcommand("select", "Rank candidate models on one dataset");
  cmd_sel->add_option("--candidates", sel.candidates_path, "Candidate-spec JSON file")
      ->required();
  cmd_sel->add_option("--data", sel.data_path, "CSV file with a header row")->required();
  cmd_sel->add_option("--criterion", sel.criterion, "tic, aic, clic (default tic)");
  cmd_sel->add_option("--at", sel.at, "Evaluation estimate: m or rbm (default rbm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rbmcli::kExitOk : rbmcli::kExitInput;
  }

  if (cmd_fit->parsed()) {
    fit.model.covariates_given = cmd_fit->count("--covariates") > 0;
    return guarded([&] { return rbmcli::run_fit(fit); });
  }
  if (cmd_sim->parsed()) return guarded([&] { return rbmcli::run_simulate(sim); });
  return guarded([&] { return rbmcli::run_select(sel); });
}
