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

#ifndef MREA_LP_LP_FORMAT_HPP_
#define MREA_LP_LP_FORMAT_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mrea/lp/linear_program.hpp"

namespace mrea::lp {

// CPLEX LP text format. Names are sanitized to the format's character set;
// numbers are written with round-trip precision.
void write_lp(const LinearProgram& problem, std::ostream& out);
std::string to_lp_string(const LinearProgram& problem);

// Throws IoError when the file cannot be written.
void export_lp(const LinearProgram& problem, const std::filesystem::path& path);

// Reads the subset of the format produced by write_lp (single-line rows,
// Bounds/Binaries/Generals sections). Throws ParseError.
LinearProgram read_lp(std::istream& in);
LinearProgram parse_lp_string(const std::string& text);

std::string sanitize_lp_name(const std::string& name);

}  // namespace mrea::lp

#endif  // MREA_LP_LP_FORMAT_HPP_
