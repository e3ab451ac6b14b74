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

#ifndef RBMEST_TOOLS_CSV_HPP
#define RBMEST_TOOLS_CSV_HPP

#include <string>
#include <vector>

namespace rbmcli {

// A fully numeric CSV table: one required header row naming the columns,
// comma separators, '.' decimal point, UTF-8 (a leading BOM is ignored).
// Parsing is locale-independent by construction.
struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // rows x header.size()

  int n() const { return static_cast<int>(rows.size()); }

  // Index of a named column, -1 when absent.
  int column(const std::string& name) const;
  // Same, but a missing column is an input error.
  int column_required(const std::string& name) const;
  std::vector<double> values(int column_index) const;
};

// Reads and parses a CSV file. Throws CliError with exit code 1 and a
// line/column diagnostic on unreadable files, ragged rows, non-numeric
// fields, duplicate header names, or files without data rows (EmptyData).
CsvTable read_csv_table(const std::string& path);

}  // namespace rbmcli

#endif  // RBMEST_TOOLS_CSV_HPP
