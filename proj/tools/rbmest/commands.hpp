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

#ifndef RBMEST_TOOLS_COMMANDS_HPP
#define RBMEST_TOOLS_COMMANDS_HPP

#include <string>
#include <vector>

#include "build.hpp"

namespace rbmcli {

struct FitOptions {
  ModelOptions model;
  std::string estimator = "rbm";  // m | rbm | onestep | penalized | logdet-penalized
  std::string data_path;
  double epsilon = -1.0;  // negative = solver default
  int max_iter = -1;
  std::vector<double> start;
  std::vector<double> null_values;
};

struct SimulateOptions {
  std::string design_path;
  std::string out_dir;
  int threads = 0;  // 0 = take the design's value
};

struct SelectOptions {
  std::string candidates_path;
  std::string data_path;
  std::string criterion = "tic";  // tic | aic | clic
  std::string at = "rbm";        // m | rbm
};

// Each command prints its JSON report on standard output and returns the
// process exit code (0 ok, 1 input error, 2 numerical failure). Input-side
// problems are thrown as CliError / rbm errors and mapped in main.
int run_fit(const FitOptions& options);
int run_simulate(const SimulateOptions& options);
int run_select(const SelectOptions& options);

}  // namespace rbmcli

#endif  // RBMEST_TOOLS_COMMANDS_HPP
