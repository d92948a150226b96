// Copyright 2026 The mrea Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MREA_TOOLS_APP_REPORT_HPP_
#define MREA_TOOLS_APP_REPORT_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mrea::app {

// Shortest text that parses back to the same double.
std::string number(double v);
std::string number(const std::optional<double>& v);  // empty cell when absent

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  // Comma-separated, '\n' line ends, cells quoted only when needed.
  void write_csv(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  // Space-aligned columns for the terminal.
  void print(std::ostream& out) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string sha256_hex(const std::string& data);

// Writes text to a file, throwing IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mrea::app

#endif  // MREA_TOOLS_APP_REPORT_HPP_
