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

#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "cli_error.hpp"

namespace rbmcli {

namespace {

// Splits one CSV record. Double quotes wrap fields that contain commas;
// an embedded quote is written as "". Only header cells ever need this,
// data cells are plain numbers.
std::vector<std::string> split_record(const std::string& line, const std::string& path,
                                      int line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted)
    throw CliError(kExitInput,
                   path + ":" + std::to_string(line_no) + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_field(const std::string& raw, const CsvTable& t, int line_no, size_t col) {
  const std::string tok = trimmed(raw);
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw CliError(kExitInput, t.path + ":" + std::to_string(line_no) + ": column " +
                                   std::to_string(col + 1) + " ('" + t.header[col] +
                                   "'): cannot parse '" + tok + "' as a number");
  return value;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

int CsvTable::column_required(const std::string& name) const {
  const int idx = column(name);
  if (idx < 0)
    throw CliError(kExitInput, path + ": no column named '" + name + "' in the header");
  return idx;
}

std::vector<double> CsvTable::values(int column_index) const {
  std::vector<double> out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) out[i] = rows[i][column_index];
  return out;
}

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(kExitInput, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);

  CsvTable t;
  t.path = path;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.header.empty()) {
      t.header = split_record(line, path, line_no);
      std::unordered_set<std::string> seen;
      for (std::string& h : t.header) {
        h = trimmed(h);
        if (h.empty())
          throw CliError(kExitInput, path + ":1: empty column name in the header");
        if (!seen.insert(h).second)
          throw CliError(kExitInput, path + ":1: duplicate column name '" + h + "'");
      }
      continue;
    }
    const std::vector<std::string> fields = split_record(line, path, line_no);
    if (fields.size() != t.header.size())
      throw CliError(kExitInput, path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(t.header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (size_t c = 0; c < fields.size(); ++c) row[c] = parse_field(fields[c], t, line_no, c);
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw CliError(kExitInput, "EmptyData: '" + path + "' is empty");
  if (t.rows.empty())
    throw CliError(kExitInput, "EmptyData: '" + path + "' has a header but no data rows");
  return t;
}

}  // namespace rbmcli
