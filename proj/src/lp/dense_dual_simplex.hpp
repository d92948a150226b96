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

#ifndef MREA_SRC_LP_DENSE_DUAL_SIMPLEX_HPP_
#define MREA_SRC_LP_DENSE_DUAL_SIMPLEX_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <vector>

#include "mrea/lp/linear_program.hpp"

namespace mrea::lp::detail {

class Deadline {
 public:
  explicit Deadline(double seconds)
      : start_(Clock::now()), limit_(seconds) {}
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }
  bool expired() const { return elapsed() > limit_; }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_;
  double limit_;
};

struct StandardForm;

// Bounded dual simplex on an explicit dense tableau B^-1 [A | I].
//
// Each row r of the problem becomes  sum_j a_rj x_j + s_r = rhs_r  after
// scaling by 1 / max_j |a_rj|; the slack bounds encode the relation. Every
// column is boxed: infinite bounds are replaced by +-kArtificialBound, so a
// dual feasible start is always available by placing each nonbasic column at
// the bound matching the sign of its reduced cost. Branch and bound changes
// column bounds and re-enters solve(), which keeps the basis dual feasible.
//
// The object is a value type; copying it duplicates the tableau (the scaled
// constraint matrix used for refactorization is shared).
class DenseDualSimplex {
 public:
  enum class Outcome {
    kOptimal,
    kInfeasible,
    kUnbounded,
    kIterationLimit,
    kTimeLimit,
    kNumerical,
  };

  static constexpr double kArtificialBound = 1e7;

  DenseDualSimplex(const LinearProgram& problem, double feasibility_tol);

  Outcome solve(const Deadline& deadline);

  std::size_t num_structural() const { return ns_; }
  double objective() const;
  std::vector<double> values() const;
  double lower(std::size_t j) const { return lo_[j]; }
  double upper(std::size_t j) const { return hi_[j]; }
  bool is_basic(std::size_t j) const { return where_[j] >= 0; }
  double reduced_cost(std::size_t j) const { return d_[j]; }
  double value(std::size_t j) const {
    return where_[j] >= 0 ? beta_[where_[j]] : val_[j];
  }
  std::int64_t iterations() const { return iterations_; }

  // Structural columns only.
  void set_bounds(std::size_t j, double lower, double upper);

 private:
  double* row(std::size_t r) { return tab_.data() + r * n_; }
  const double* row(std::size_t r) const { return tab_.data() + r * n_; }

  int choose_leaving_row(bool bland) const;
  int choose_entering(int r, bool to_lower, bool bland) const;
  void pivot(int r, int q, double target);
  bool refactor();
  void restore_dual_feasibility();
  double dual_objective() const;
  double max_scaled_violation() const;

  std::shared_ptr<const StandardForm> form_;
  std::size_t m_ = 0;   // rows
  std::size_t ns_ = 0;  // structural columns
  std::size_t n_ = 0;   // ns_ + m_
  double ptol_ = 1e-7;

  std::vector<double> tab_;   // m_ x n_, row-major
  std::vector<double> beta_;  // basic values per row
  std::vector<double> d_;     // reduced costs
  std::vector<double> lo_, hi_;
  std::vector<double> val_;   // nonbasic values
  std::vector<char> at_upper_;  // nonbasic position
  std::vector<int> basis_;    // column basic in each row
  std::vector<int> where_;    // row of a basic column, -1 otherwise
  std::vector<double> column_;  // scratch
  std::int64_t iterations_ = 0;
  std::int64_t since_refactor_ = 0;
};

}  // namespace mrea::lp::detail

#endif  // MREA_SRC_LP_DENSE_DUAL_SIMPLEX_HPP_
