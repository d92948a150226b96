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

#ifndef MREA_LP_LINEAR_PROGRAM_HPP_
#define MREA_LP_LINEAR_PROGRAM_HPP_

#include <compare>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mrea::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct VarId {
  std::int32_t index = -1;

  bool valid() const { return index >= 0; }
  friend auto operator<=>(const VarId&, const VarId&) = default;
};

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  bool is_integer = false;
};

struct Term {
  VarId var;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

// A minimization problem over bounded variables and sparse linear rows.
// Integer variables are restricted to binaries.
class LinearProgram {
 public:
  explicit LinearProgram(std::string name = "problem") : name_(std::move(name)) {}

  VarId add_variable(std::string name, double lower, double upper,
                     bool is_integer = false);
  VarId add_binary(std::string name) {
    return add_variable(std::move(name), 0.0, 1.0, true);
  }
  void set_bounds(VarId var, double lower, double upper);

  void set_objective(VarId var, double coef);
  void add_objective(VarId var, double coef);
  void set_objective_offset(double offset) { objective_offset_ = offset; }

  // Duplicate variables within one row are merged.
  void add_constraint(std::string name, std::vector<Term> terms,
                      Relation relation, double rhs);

  const std::string& name() const { return name_; }
  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  std::size_t num_integer() const;

  const Variable& variable(VarId var) const;
  std::span<const Variable> variables() const { return variables_; }
  std::span<const Constraint> constraints() const { return constraints_; }
  std::span<const double> objective() const { return objective_; }
  double objective_offset() const { return objective_offset_; }

  // Throws InvalidArgument on dangling references, inverted bounds, NaNs or
  // integer variables whose bounds leave {0, 1}.
  void validate() const;

  double evaluate_objective(std::span<const double> values) const;
  double row_activity(std::size_t row, std::span<const double> values) const;
  // Largest bound or row violation of a point (absolute units).
  double max_violation(std::span<const double> values) const;

 private:
  void check(VarId var) const;

  std::string name_;
  std::vector<Variable> variables_;
  std::vector<double> objective_;
  double objective_offset_ = 0.0;
  std::vector<Constraint> constraints_;
};

}  // namespace mrea::lp

#endif  // MREA_LP_LINEAR_PROGRAM_HPP_
