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

#ifndef MREA_LP_SOLVER_HPP_
#define MREA_LP_SOLVER_HPP_

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "mrea/lp/linear_program.hpp"

namespace mrea::lp {

enum class SolveStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kTimeLimit,
  kNumericalFailure,
};

std::string_view to_string(SolveStatus status);

struct SolveOptions {
  double time_limit = 60.0;  // seconds
  double mip_gap = 1e-8;     // relative
  double feasibility_tol = 1e-7;

  friend bool operator==(const SolveOptions&, const SolveOptions&) = default;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  // Populated only when status == kOptimal, indexed by VarId::index.
  std::vector<double> primal_values;
  double best_bound = -kInfinity;
  double wall_time = 0.0;
  std::int64_t nodes = 0;
  std::int64_t simplex_iterations = 0;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  double value(VarId var) const { return primal_values.at(var.index); }
};

// Engine-neutral entry point. Implementations must never abort the process;
// every failure mode is reported through SolveResult::status.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string_view name() const = 0;
  virtual SolveResult solve(const LinearProgram& problem,
                            const SolveOptions& options) const = 0;
};

// Self-contained backend: bounded dual simplex on a dense tableau, with
// depth-first branch and bound over the binaries.
const SolverBackend& builtin_backend();

const SolverBackend& default_backend();

// Installs another backend as the default; nullptr restores the built-in one.
// The pointee must outlive every subsequent solve() call.
void set_default_backend(const SolverBackend* backend);

SolveResult solve(const LinearProgram& problem, const SolveOptions& options = {});

}  // namespace mrea::lp

#endif  // MREA_LP_SOLVER_HPP_
