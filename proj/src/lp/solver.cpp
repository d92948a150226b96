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

#include "mrea/lp/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <utility>

#include <spdlog/spdlog.h>

#include "dense_dual_simplex.hpp"

namespace mrea::lp {

using detail::Deadline;
using detail::DenseDualSimplex;
using Outcome = DenseDualSimplex::Outcome;

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kTimeLimit: return "time_limit";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

constexpr double kIntegralityTol = 1e-6;

double unboxed(double bound) {
  if (bound <= -DenseDualSimplex::kArtificialBound) return -kInfinity;
  if (bound >= DenseDualSimplex::kArtificialBound) return kInfinity;
  return bound;
}

std::vector<double> finalize(const LinearProgram& problem, std::vector<double> x) {
  const auto vars = problem.variables();
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (vars[j].is_integer) x[j] = std::round(x[j]);
    x[j] = std::clamp(x[j], vars[j].lower, vars[j].upper);
  }
  return x;
}

class BranchAndBound {
 public:
  BranchAndBound(const LinearProgram& problem, const SolveOptions& options,
                 const Deadline& deadline)
      : problem_(problem), options_(options), deadline_(deadline) {
    const auto vars = problem.variables();
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (vars[j].is_integer) integers_.push_back(j);
    }
  }

  SolveResult run(DenseDualSimplex root) {
    SolveResult result;
    std::vector<DenseDualSimplex> stack;
    stack.push_back(std::move(root));
    bool lost = false;

    while (!stack.empty()) {
      if (deadline_.expired()) return stopped(SolveStatus::kTimeLimit, stack);
      DenseDualSimplex node = std::move(stack.back());
      stack.pop_back();
      ++nodes_;

      const Outcome outcome = resolve(node);
      if (outcome == Outcome::kTimeLimit) return stopped(SolveStatus::kTimeLimit, stack);
      if (outcome == Outcome::kInfeasible) continue;
      if (outcome != Outcome::kOptimal) {
        lost = true;
        continue;
      }
      const double bound = node.objective();
      if (bound >= cutoff()) continue;

      const std::vector<double> x = node.values();
      int branch = -1;
      double best_frac = kIntegralityTol;
      for (std::size_t j : integers_) {
        const double frac = std::abs(x[j] - std::round(x[j]));
        if (frac > best_frac) {
          best_frac = frac;
          branch = static_cast<int>(j);
        }
      }
      if (branch < 0) {
        incumbent_ = bound;
        best_x_ = x;
        continue;
      }
      if (!best_x_ || nodes_ % 16 == 1) try_rounding(node, x);
      if (best_x_) fix_by_reduced_cost(node, bound);

      const auto k = static_cast<std::size_t>(branch);
      const bool up_first = x[k] >= 0.5;
      DenseDualSimplex second = node;
      if (up_first) {
        second.set_bounds(k, node.lower(k), 0.0);
        node.set_bounds(k, 1.0, node.upper(k));
      } else {
        second.set_bounds(k, 1.0, node.upper(k));
        node.set_bounds(k, node.lower(k), 0.0);
      }
      stack.push_back(std::move(second));
      stack.push_back(std::move(node));
    }

    result.nodes = nodes_;
    result.simplex_iterations = iterations_;
    if (!best_x_) {
      result.status = lost ? SolveStatus::kNumericalFailure : SolveStatus::kInfeasible;
      return result;
    }
    if (lost) spdlog::warn("branch and bound: some nodes failed numerically");
    result.status = lost ? SolveStatus::kNumericalFailure : SolveStatus::kOptimal;
    result.primal_values = finalize(problem_, *best_x_);
    result.objective_value = problem_.evaluate_objective(result.primal_values);
    result.best_bound = incumbent_;
    if (!result.optimal()) result.primal_values.clear();
    return result;
  }

 private:
  double cutoff() const {
    if (!best_x_) return kInfinity;
    return incumbent_ - std::max(1e-9, options_.mip_gap * std::max(1.0, std::abs(incumbent_)));
  }

  Outcome resolve(DenseDualSimplex& node) {
    const std::int64_t before = node.iterations();
    Outcome outcome = node.solve(deadline_);
    iterations_ += node.iterations() - before;
    if (outcome == Outcome::kOptimal || outcome == Outcome::kInfeasible ||
        outcome == Outcome::kTimeLimit) {
      return outcome;
    }
    // Start over from a fresh tableau with the node's bounds.
    LinearProgram copy = problem_;
    for (std::size_t j = 0; j < node.num_structural(); ++j) {
      copy.set_bounds(VarId{static_cast<std::int32_t>(j)}, unboxed(node.lower(j)),
                      unboxed(node.upper(j)));
    }
    DenseDualSimplex fresh(copy, options_.feasibility_tol);
    outcome = fresh.solve(deadline_);
    iterations_ += fresh.iterations();
    node = std::move(fresh);
    return outcome;
  }

  void try_rounding(const DenseDualSimplex& node, const std::vector<double>& x) {
    DenseDualSimplex probe = node;
    for (std::size_t j : integers_) {
      const double r = std::clamp(std::round(x[j]), node.lower(j), node.upper(j));
      probe.set_bounds(j, r, r);
    }
    const std::int64_t before = probe.iterations();
    const Outcome outcome = probe.solve(deadline_);
    iterations_ += probe.iterations() - before;
    if (outcome != Outcome::kOptimal) return;
    const double value = probe.objective();
    if (value < cutoff()) {
      incumbent_ = value;
      best_x_ = probe.values();
    }
  }

  void fix_by_reduced_cost(DenseDualSimplex& node, double bound) {
    const double slack = incumbent_ - bound;
    for (std::size_t j : integers_) {
      if (node.is_basic(j) || node.lower(j) == node.upper(j)) continue;
      const double d = node.reduced_cost(j);
      const double v = node.value(j);
      if (v == node.lower(j) && d > slack) {
        node.set_bounds(j, node.lower(j), node.lower(j));
      } else if (v == node.upper(j) && -d > slack) {
        node.set_bounds(j, node.upper(j), node.upper(j));
      }
    }
  }

  SolveResult stopped(SolveStatus status, const std::vector<DenseDualSimplex>&) {
    SolveResult result;
    result.status = status;
    result.nodes = nodes_;
    result.simplex_iterations = iterations_;
    if (best_x_) {
      result.objective_value =
          problem_.evaluate_objective(finalize(problem_, *best_x_));
    }
    return result;
  }

  const LinearProgram& problem_;
  const SolveOptions& options_;
  const Deadline& deadline_;
  std::vector<std::size_t> integers_;
  double incumbent_ = kInfinity;
  std::optional<std::vector<double>> best_x_;
  std::int64_t nodes_ = 0;
  std::int64_t iterations_ = 0;
};

SolveStatus map_outcome(Outcome outcome) {
  switch (outcome) {
    case Outcome::kOptimal: return SolveStatus::kOptimal;
    case Outcome::kInfeasible: return SolveStatus::kInfeasible;
    case Outcome::kUnbounded: return SolveStatus::kUnbounded;
    case Outcome::kTimeLimit: return SolveStatus::kTimeLimit;
    case Outcome::kIterationLimit:
    case Outcome::kNumerical: return SolveStatus::kNumericalFailure;
  }
  return SolveStatus::kNumericalFailure;
}

class BuiltinBackend final : public SolverBackend {
 public:
  std::string_view name() const override { return "builtin"; }

  SolveResult solve(const LinearProgram& problem,
                    const SolveOptions& options) const override {
    problem.validate();
    const Deadline deadline(options.time_limit);
    DenseDualSimplex root(problem, options.feasibility_tol);
    const Outcome outcome = root.solve(deadline);

    SolveResult result;
    if (outcome != Outcome::kOptimal || problem.num_integer() == 0) {
      result.status = map_outcome(outcome);
      result.simplex_iterations = root.iterations();
      result.nodes = 1;
      if (result.optimal()) {
        result.primal_values = finalize(problem, root.values());
        result.objective_value = root.objective();
        result.best_bound = result.objective_value;
      }
    } else {
      const std::int64_t root_iterations = root.iterations();
      BranchAndBound search(problem, options, deadline);
      result = search.run(std::move(root));
      result.simplex_iterations += root_iterations;
    }
    result.wall_time = deadline.elapsed();
    return result;
  }
};

std::atomic<const SolverBackend*> g_default{nullptr};

}  // namespace

const SolverBackend& builtin_backend() {
  static const BuiltinBackend backend;
  return backend;
}

const SolverBackend& default_backend() {
  const SolverBackend* backend = g_default.load();
  return backend != nullptr ? *backend : builtin_backend();
}

void set_default_backend(const SolverBackend* backend) { g_default.store(backend); }

SolveResult solve(const LinearProgram& problem, const SolveOptions& options) {
  return default_backend().solve(problem, options);
}

}  // namespace mrea::lp
