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

#include "app/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>
#include <spdlog/fmt/fmt.h>

#include "mrea/errors.hpp"

namespace mrea::app {

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string number(double v) {
  if (v == 0.0) return "0";
  return fmt::format("{}", v);
}

std::string number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

void Table::add(std::vector<std::string> row) {
  row.resize(header_.size());
  rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << quote(cells[i]);
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void Table::save(const std::filesystem::path& path) const {
  std::ostringstream text;
  write_csv(text);
  write_text(path, text.str());
}

void Table::print(std::ostream& out) const {
  // Seven significant digits are plenty on a terminal; the CSV keeps all.
  std::vector<std::vector<std::string>> rows = rows_;
  for (auto& r : rows) {
    for (auto& cell : r) {
      double v = 0.0;
      const char* end = cell.data() + cell.size();
      const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
      if (ec == std::errc() && ptr == end && !cell.empty()) cell = fmt::format("{:.7g}", v);
    }
  }
  std::vector<std::size_t> width(header_.size());
  for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << (c == 0 ? "" : "  ") << cells[c];
      if (c + 1 < cells.size()) out << std::string(width[c] - cells[c].size(), ' ');
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows) line(r);
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) {
    throw IoError("cannot write " + path.string());
  }
}

}  // namespace mrea::app
