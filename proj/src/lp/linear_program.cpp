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

#include "mrea/lp/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrea/errors.hpp"

namespace mrea::lp {

VarId LinearProgram::add_variable(std::string name, double lower, double upper,
                                  bool is_integer) {
  VarId id{static_cast<std::int32_t>(variables_.size())};
  if (name.empty()) name = "v" + std::to_string(id.index);
  variables_.push_back({std::move(name), lower, upper, is_integer});
  objective_.push_back(0.0);
  return id;
}

void LinearProgram::check(VarId var) const {
  if (var.index < 0 || static_cast<std::size_t>(var.index) >= variables_.size()) {
    throw InvalidArgument("LinearProgram '" + name_ +
                          "': reference to undeclared variable " +
                          std::to_string(var.index));
  }
}

void LinearProgram::set_bounds(VarId var, double lower, double upper) {
  check(var);
  variables_[var.index].lower = lower;
  variables_[var.index].upper = upper;
}

void LinearProgram::set_objective(VarId var, double coef) {
  check(var);
  objective_[var.index] = coef;
}

void LinearProgram::add_objective(VarId var, double coef) {
  check(var);
  objective_[var.index] += coef;
}

void LinearProgram::add_constraint(std::string name, std::vector<Term> terms,
                                   Relation relation, double rhs) {
  for (const Term& t : terms) check(t.var);
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  if (name.empty()) name = "c" + std::to_string(constraints_.size());
  constraints_.push_back({std::move(name), std::move(merged), relation, rhs});
}

std::size_t LinearProgram::num_integer() const {
  return static_cast<std::size_t>(std::count_if(
      variables_.begin(), variables_.end(),
      [](const Variable& v) { return v.is_integer; }));
}

const Variable& LinearProgram::variable(VarId var) const {
  check(var);
  return variables_[var.index];
}

void LinearProgram::validate() const {
  for (const Variable& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw InvalidArgument("variable '" + v.name + "' has invalid bounds");
    }
    if (v.is_integer && (v.lower < 0.0 || v.upper > 1.0)) {
      throw InvalidArgument("integer variable '" + v.name +
                            "' must have bounds within {0, 1}");
    }
  }
  for (double c : objective_) {
    if (!std::isfinite(c)) throw InvalidArgument("non-finite objective coefficient");
  }
  for (const Constraint& row : constraints_) {
    if (!std::isfinite(row.rhs)) {
      throw InvalidArgument("constraint '" + row.name + "' has non-finite rhs");
    }
    for (const Term& t : row.terms) {
      check(t.var);
      if (!std::isfinite(t.coef)) {
        throw InvalidArgument("constraint '" + row.name +
                              "' has a non-finite coefficient");
      }
    }
  }
}

double LinearProgram::evaluate_objective(std::span<const double> values) const {
  double total = objective_offset_;
  for (std::size_t j = 0; j < objective_.size(); ++j) total += objective_[j] * values[j];
  return total;
}

double LinearProgram::row_activity(std::size_t row,
                                   std::span<const double> values) const {
  double activity = 0.0;
  for (const Term& t : constraints_[row].terms) activity += t.coef * values[t.var.index];
  return activity;
}

double LinearProgram::max_violation(std::span<const double> values) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    worst = std::max({worst, variables_[j].lower - values[j],
                      values[j] - variables_[j].upper});
  }
  for (std::size_t r = 0; r < constraints_.size(); ++r) {
    const double a = row_activity(r, values);
    const double rhs = constraints_[r].rhs;
    switch (constraints_[r].relation) {
      case Relation::kLessEqual:
        worst = std::max(worst, a - rhs);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, rhs - a);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(a - rhs));
        break;
    }
  }
  return worst;
}

}  // namespace mrea::lp
