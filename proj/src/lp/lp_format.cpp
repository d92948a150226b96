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

#include "mrea/lp/lp_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "mrea/errors.hpp"

namespace mrea::lp {

namespace {

constexpr std::size_t kMaxNameLength = 255;
constexpr std::size_t kTermsPerLine = 8;

bool allowed_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  static const std::string extra = "!\"#$%&()/,.;?@_`'{}|~";
  return extra.find(c) != std::string::npos;
}

std::string format_number(double v) {
  if (v == kInfinity) return "inf";
  if (v == -kInfinity) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Unique sanitized names, one per index.
std::vector<std::string> unique_names(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string name = sanitize_lp_name(raw[i]);
    if (!seen.insert(name).second) {
      std::string base = name + "_" + std::to_string(i);
      name = base;
      for (int k = 1; !seen.insert(name).second; ++k) name = base + "_" + std::to_string(k);
    }
    out.push_back(std::move(name));
  }
  return out;
}

void write_terms(std::ostream& out, const std::vector<std::pair<double, std::string>>& terms) {
  std::size_t count = 0;
  for (const auto& [coef, name] : terms) {
    if (count > 0 && count % kTermsPerLine == 0) out << "\n   ";
    out << (std::signbit(coef) ? " - " : " + ") << format_number(std::abs(coef)) << ' ' << name;
    ++count;
  }
}

}  // namespace

std::string sanitize_lp_name(const std::string& name) {
  std::string out;
  out.reserve(name.size() + 1);
  for (char c : name) out.push_back(allowed_char(c) ? c : '_');
  if (out.empty()) return "_";
  const char first = out.front();
  const bool looks_numeric = std::isdigit(static_cast<unsigned char>(first)) || first == '.';
  const bool looks_exponent = (first == 'e' || first == 'E') &&
                              (out.size() == 1 || std::isdigit(static_cast<unsigned char>(out[1])));
  const bool reserved = out == "inf" || out == "infinity" || out == "free";
  if (looks_numeric || looks_exponent || reserved) out.insert(out.begin(), '_');
  if (out.size() > kMaxNameLength) out.resize(kMaxNameLength);
  return out;
}

void write_lp(const LinearProgram& problem, std::ostream& out) {
  const auto vars = problem.variables();
  const auto rows = problem.constraints();
  std::vector<std::string> raw;
  for (const Variable& v : vars) raw.push_back(v.name);
  const std::vector<std::string> names = unique_names(raw);
  raw.clear();
  for (const Constraint& c : rows) raw.push_back(c.name);
  std::vector<std::string> row_names = unique_names(raw);
  // Row names live in their own namespace but must not shadow "obj".
  for (auto& n : row_names) {
    if (n == "obj") n = "obj_";
  }

  out << "\\ Problem: " << sanitize_lp_name(problem.name()) << "\n";
  out << "Minimize\n obj:";
  std::vector<std::pair<double, std::string>> terms;
  const auto objective = problem.objective();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (objective[j] != 0.0) terms.emplace_back(objective[j], names[j]);
  }
  write_terms(out, terms);
  const double offset = problem.objective_offset();
  if (offset != 0.0 || terms.empty()) {
    out << (std::signbit(offset) ? " - " : " + ") << format_number(std::abs(offset));
  }
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Constraint& c = rows[r];
    terms.clear();
    for (const Term& t : c.terms) terms.emplace_back(t.coef, names[t.var.index]);
    if (terms.empty() && !vars.empty()) terms.emplace_back(0.0, names[0]);
    out << ' ' << row_names[r] << ':';
    write_terms(out, terms);
    switch (c.relation) {
      case Relation::kLessEqual: out << " <= "; break;
      case Relation::kGreaterEqual: out << " >= "; break;
      case Relation::kEqual: out << " = "; break;
    }
    out << format_number(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const Variable& v = vars[j];
    if (v.lower == -kInfinity && v.upper == kInfinity) {
      out << ' ' << names[j] << " free\n";
    } else if (v.upper == kInfinity) {
      out << ' ' << names[j] << " >= " << format_number(v.lower) << "\n";
    } else {
      out << ' ' << format_number(v.lower) << " <= " << names[j] << " <= "
          << format_number(v.upper) << "\n";
    }
  }
  bool header = false;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (!vars[j].is_integer) continue;
    if (!header) out << "Binaries\n";
    header = true;
    out << ' ' << names[j] << "\n";
  }
  out << "End\n";
}

std::string to_lp_string(const LinearProgram& problem) {
  std::ostringstream out;
  write_lp(problem, out);
  return out.str();
}

void export_lp(const LinearProgram& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_lp(problem, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

enum class Section { kNone, kObjective, kRows, kBounds, kBinaries, kGenerals, kEnd };

struct Token {
  std::string text;
  std::size_t line;
};

std::optional<double> parse_number(const std::string& s) {
  std::string_view v = s;
  double sign = 1.0;
  if (!v.empty() && (v.front() == '+' || v.front() == '-')) {
    if (v.front() == '-') sign = -1.0;
    v.remove_prefix(1);
  }
  std::string lower(v);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "inf" || lower == "infinity") return sign * kInfinity;
  if (v.empty() || !(std::isdigit(static_cast<unsigned char>(v.front())) || v.front() == '.')) {
    return std::nullopt;
  }
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
  return sign * out;
}

struct PendingRow {
  std::string name;
  std::vector<std::pair<double, std::string>> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

struct PendingBound {
  double lower = 0.0;
  double upper = kInfinity;
};

class Reader {
 public:
  explicit Reader(std::istream& in) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      const auto comment = line.find('\\');
      if (comment != std::string::npos) line.resize(comment);
      std::istringstream words(line);
      std::vector<std::string> tokens;
      for (std::string w; words >> w;) tokens.push_back(w);
      if (tokens.empty()) continue;
      lines_.push_back({std::move(tokens), number});
    }
  }

  LinearProgram read() {
    Section section = Section::kNone;
    std::vector<Token> stream;
    auto flush = [&](Section s) {
      if (s == Section::kObjective) parse_objective(stream);
      if (s == Section::kRows) parse_rows(stream);
      stream.clear();
    };
    for (auto& [tokens, number] : lines_) {
      const Section next = header(tokens, number);
      if (next != Section::kNone) {
        flush(section);
        section = next;
        if (section == Section::kEnd) break;
        continue;
      }
      switch (section) {
        case Section::kObjective:
        case Section::kRows:
          for (auto& t : tokens) stream.push_back({t, number});
          break;
        case Section::kBounds:
          parse_bound(tokens, number);
          break;
        case Section::kBinaries:
        case Section::kGenerals:
          for (auto& t : tokens) {
            touch(t);
            integers_.insert(t);
          }
          break;
        default:
          throw ParseError("content before the objective section", number);
      }
    }
    if (section != Section::kEnd) {
      flush(section);
      throw ParseError("missing End", lines_.empty() ? 0 : lines_.back().second);
    }
    return build();
  }

 private:
  Section header(const std::vector<std::string>& tokens, std::size_t number) {
    std::string joined;
    for (const auto& t : tokens) {
      if (!joined.empty()) joined += ' ';
      for (char c : t) joined += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (joined == "minimize" || joined == "minimum" || joined == "min") return Section::kObjective;
    if (joined == "maximize" || joined == "maximum" || joined == "max") {
      throw ParseError("maximization problems are not supported", number);
    }
    if (joined == "subject to" || joined == "such that" || joined == "st" || joined == "s.t.") {
      return Section::kRows;
    }
    if (joined == "bounds" || joined == "bound") return Section::kBounds;
    if (joined == "binaries" || joined == "binary" || joined == "bin") return Section::kBinaries;
    if (joined == "generals" || joined == "general" || joined == "gen") return Section::kGenerals;
    if (joined == "end") return Section::kEnd;
    return Section::kNone;
  }

  void touch(const std::string& name) {
    if (order_index_.emplace(name, order_.size()).second) order_.push_back(name);
  }

  void declare(const std::string& name) {
    touch(name);
    bound_seq_.emplace(name, bound_seq_.size());
  }

  // Parses "[+|-] [coef] name" sequences; a trailing number is a constant.
  std::vector<std::pair<double, std::string>> parse_terms(const std::vector<Token>& tokens,
                                                          std::size_t& pos, double* constant,
                                                          bool stop_at_relation) {
    std::vector<std::pair<double, std::string>> terms;
    double sign = 1.0;
    double coef = 1.0;
    bool has_coef = false;
    while (pos < tokens.size()) {
      const std::string& t = tokens[pos].text;
      if (stop_at_relation && (t == "<=" || t == ">=" || t == "=" || t == "<" || t == ">" ||
                               t == "=<" || t == "=>")) {
        break;
      }
      ++pos;
      if (t == "+") continue;
      if (t == "-") {
        sign = -sign;
        continue;
      }
      if (auto number = parse_number(t)) {
        if (has_coef) throw ParseError("two consecutive numbers", tokens[pos - 1].line);
        coef = *number;
        has_coef = true;
        continue;
      }
      touch(t);
      terms.emplace_back(sign * coef, t);
      sign = 1.0;
      coef = 1.0;
      has_coef = false;
    }
    if (has_coef) {
      if (constant == nullptr) throw ParseError("dangling number", tokens[pos - 1].line);
      *constant += sign * coef;
    }
    return terms;
  }

  void parse_objective(const std::vector<Token>& tokens) {
    std::size_t pos = 0;
    if (!tokens.empty() && tokens[0].text.back() == ':') pos = 1;
    objective_ = parse_terms(tokens, pos, &offset_, false);
  }

  void parse_rows(const std::vector<Token>& tokens) {
    std::size_t pos = 0;
    while (pos < tokens.size()) {
      PendingRow row;
      if (tokens[pos].text.back() == ':' && tokens[pos].text.size() > 1) {
        row.name = tokens[pos].text.substr(0, tokens[pos].text.size() - 1);
        ++pos;
      } else {
        row.name = "c" + std::to_string(rows_.size());
      }
      const std::size_t line = tokens[std::min(pos, tokens.size() - 1)].line;
      row.terms = parse_terms(tokens, pos, nullptr, true);
      if (pos + 1 >= tokens.size()) throw ParseError("row without relation", line);
      const std::string& rel = tokens[pos].text;
      if (rel == "<=" || rel == "<" || rel == "=<") {
        row.relation = Relation::kLessEqual;
      } else if (rel == ">=" || rel == ">" || rel == "=>") {
        row.relation = Relation::kGreaterEqual;
      } else {
        row.relation = Relation::kEqual;
      }
      ++pos;
      double sign = 1.0;
      if (tokens[pos].text == "-" || tokens[pos].text == "+") {
        if (tokens[pos].text == "-") sign = -1.0;
        if (++pos >= tokens.size()) throw ParseError("row without right-hand side", line);
      }
      const auto rhs = parse_number(tokens[pos].text);
      if (!rhs) throw ParseError("invalid right-hand side '" + tokens[pos].text + "'", tokens[pos].line);
      row.rhs = sign * *rhs;
      ++pos;
      rows_.push_back(std::move(row));
    }
  }

  void parse_bound(const std::vector<std::string>& t, std::size_t line) {
    auto number = [&](const std::string& s) {
      const auto v = parse_number(s);
      if (!v) throw ParseError("invalid bound value '" + s + "'", line);
      return *v;
    };
    if (t.size() == 2 && (t[1] == "free" || t[1] == "Free" || t[1] == "FREE")) {
      declare(t[0]);
      bounds_[t[0]] = {-kInfinity, kInfinity};
      return;
    }
    if (t.size() == 5 && (t[1] == "<=" || t[1] == "<") && (t[3] == "<=" || t[3] == "<")) {
      declare(t[2]);
      bounds_[t[2]] = {number(t[0]), number(t[4])};
      return;
    }
    if (t.size() == 3) {
      declare(t[0]);
      PendingBound& b = bounds_[t[0]];
      const double v = number(t[2]);
      if (t[1] == ">=" || t[1] == ">") {
        b.lower = v;
      } else if (t[1] == "<=" || t[1] == "<") {
        b.upper = v;
      } else if (t[1] == "=") {
        b.lower = b.upper = v;
      } else {
        throw ParseError("unrecognised bound", line);
      }
      return;
    }
    throw ParseError("unrecognised bound", line);
  }

  LinearProgram build() {
    LinearProgram problem;
    // Declaration order follows the Bounds section, which write_lp emits
    // in index order for every column.
    std::vector<std::string> order;
    std::unordered_set<std::string> placed;
    for (const auto& name : bound_order()) {
      if (placed.insert(name).second) order.push_back(name);
    }
    for (const auto& name : order_) {
      if (placed.insert(name).second) order.push_back(name);
    }
    std::unordered_map<std::string, VarId> ids;
    for (const auto& name : order) {
      PendingBound b;
      if (auto it = bounds_.find(name); it != bounds_.end()) b = it->second;
      const bool integer = integers_.contains(name);
      if (integer && bounds_.find(name) == bounds_.end()) b.upper = 1.0;
      ids[name] = problem.add_variable(name, b.lower, b.upper, integer);
    }
    for (const auto& [coef, name] : objective_) problem.add_objective(ids.at(name), coef);
    problem.set_objective_offset(offset_);
    for (const auto& row : rows_) {
      std::vector<Term> terms;
      for (const auto& [coef, name] : row.terms) terms.push_back({ids.at(name), coef});
      problem.add_constraint(row.name, std::move(terms), row.relation, row.rhs);
    }
    return problem;
  }

  std::vector<std::string> bound_order() const {
    std::vector<std::pair<std::size_t, std::string>> listed;
    for (const auto& [name, b] : bounds_) listed.emplace_back(bound_seq_.at(name), name);
    std::sort(listed.begin(), listed.end());
    std::vector<std::string> out;
    for (auto& [seq, name] : listed) out.push_back(name);
    return out;
  }

  std::vector<std::pair<std::vector<std::string>, std::size_t>> lines_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::size_t> order_index_;
  std::vector<std::pair<double, std::string>> objective_;
  double offset_ = 0.0;
  std::vector<PendingRow> rows_;
  std::unordered_map<std::string, PendingBound> bounds_;
  std::unordered_map<std::string, std::size_t> bound_seq_;
  std::set<std::string> integers_;
};

}  // namespace

LinearProgram read_lp(std::istream& in) { return Reader(in).read(); }

LinearProgram parse_lp_string(const std::string& text) {
  std::istringstream in(text);
  return read_lp(in);
}

}  // namespace mrea::lp
