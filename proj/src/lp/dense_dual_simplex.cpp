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

#include "dense_dual_simplex.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mrea/simd/kernels.hpp"

namespace mrea::lp::detail {

struct StandardForm {
  std::size_t m = 0;
  std::size_t ns = 0;
  Eigen::MatrixXd a;          // scaled structural block, m x ns
  Eigen::VectorXd rhs;        // scaled
  std::vector<double> cost;   // structural then slack (zero)
  std::vector<Relation> relation;
  double offset = 0.0;
};

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDualTol = 1e-9;

double boxed(double bound) {
  if (bound == -kInfinity) return -DenseDualSimplex::kArtificialBound;
  if (bound == kInfinity) return DenseDualSimplex::kArtificialBound;
  return bound;
}

}  // namespace

DenseDualSimplex::DenseDualSimplex(const LinearProgram& problem,
                                   double feasibility_tol)
    : ptol_(feasibility_tol) {
  auto form = std::make_shared<StandardForm>();
  m_ = problem.num_constraints();
  ns_ = problem.num_variables();
  n_ = ns_ + m_;
  form->m = m_;
  form->ns = ns_;
  form->a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_),
                                  static_cast<Eigen::Index>(ns_));
  form->rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
  form->cost.assign(n_, 0.0);
  form->offset = problem.objective_offset();
  const auto objective = problem.objective();
  std::copy(objective.begin(), objective.end(), form->cost.begin());

  lo_.assign(n_, 0.0);
  hi_.assign(n_, 0.0);
  val_.assign(n_, 0.0);
  at_upper_.assign(n_, 0);
  where_.assign(n_, -1);
  basis_.assign(m_, -1);
  beta_.assign(m_, 0.0);
  column_.assign(m_, 0.0);
  tab_.assign(m_ * n_, 0.0);

  const auto constraints = problem.constraints();
  for (std::size_t r = 0; r < m_; ++r) {
    const Constraint& c = constraints[r];
    double scale = 0.0;
    for (const Term& t : c.terms) scale = std::max(scale, std::abs(t.coef));
    scale = scale > 0.0 ? 1.0 / scale : 1.0;
    for (const Term& t : c.terms) {
      form->a(static_cast<Eigen::Index>(r), t.var.index) = t.coef * scale;
    }
    form->rhs(static_cast<Eigen::Index>(r)) = c.rhs * scale;
    form->relation.push_back(c.relation);

    const std::size_t s = ns_ + r;
    switch (c.relation) {
      case Relation::kLessEqual:
        lo_[s] = 0.0;
        hi_[s] = kArtificialBound;
        break;
      case Relation::kGreaterEqual:
        lo_[s] = -kArtificialBound;
        hi_[s] = 0.0;
        break;
      case Relation::kEqual:
        lo_[s] = 0.0;
        hi_[s] = 0.0;
        break;
    }
  }
  form_ = std::move(form);

  const auto variables = problem.variables();
  for (std::size_t j = 0; j < ns_; ++j) {
    lo_[j] = boxed(variables[j].lower);
    hi_[j] = boxed(variables[j].upper);
    const bool upper = form_->cost[j] < 0.0 && lo_[j] < hi_[j];
    at_upper_[j] = upper ? 1 : 0;
    val_[j] = upper ? hi_[j] : lo_[j];
  }
  d_ = form_->cost;

  for (std::size_t r = 0; r < m_; ++r) {
    double* t = row(r);
    double activity = 0.0;
    for (std::size_t j = 0; j < ns_; ++j) {
      t[j] = form_->a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      activity += t[j] * val_[j];
    }
    t[ns_ + r] = 1.0;
    basis_[r] = static_cast<int>(ns_ + r);
    where_[ns_ + r] = static_cast<int>(r);
    beta_[r] = form_->rhs(static_cast<Eigen::Index>(r)) - activity;
  }
}

double DenseDualSimplex::dual_objective() const {
  double total = 0.0;
  for (std::size_t j = 0; j < ns_; ++j) total += form_->cost[j] * value(j);
  return total;
}

double DenseDualSimplex::objective() const {
  return dual_objective() + form_->offset;
}

std::vector<double> DenseDualSimplex::values() const {
  std::vector<double> out(ns_);
  for (std::size_t j = 0; j < ns_; ++j) out[j] = value(j);
  return out;
}

void DenseDualSimplex::set_bounds(std::size_t j, double lower, double upper) {
  lo_[j] = boxed(lower);
  hi_[j] = boxed(upper);
  if (where_[j] >= 0) return;  // basic: the next solve() repairs feasibility
  const bool to_upper = d_[j] < 0.0 && lo_[j] < hi_[j];
  const double next = to_upper ? hi_[j] : lo_[j];
  const double delta = next - val_[j];
  at_upper_[j] = to_upper ? 1 : 0;
  val_[j] = next;
  if (delta != 0.0) {
    for (std::size_t r = 0; r < m_; ++r) beta_[r] -= row(r)[j] * delta;
  }
}

int DenseDualSimplex::choose_leaving_row(bool bland) const {
  int best = -1;
  double best_violation = ptol_;
  int best_col = static_cast<int>(n_);
  for (std::size_t r = 0; r < m_; ++r) {
    const int col = basis_[r];
    const double v = beta_[r];
    const double violation = std::max(lo_[col] - v, v - hi_[col]);
    if (violation <= ptol_) continue;
    if (bland) {
      if (col < best_col) {
        best_col = col;
        best = static_cast<int>(r);
      }
    } else if (violation > best_violation) {
      best_violation = violation;
      best = static_cast<int>(r);
    }
  }
  return best;
}

int DenseDualSimplex::choose_entering(int r, bool to_lower, bool bland) const {
  const double* alpha = row(static_cast<std::size_t>(r));
  // Harris two-pass ratio test: bound the dual step with relaxed reduced
  // costs, then pick the largest pivot among the admissible columns.
  double theta_max = kInfinity;
  for (std::size_t j = 0; j < n_; ++j) {
    if (where_[j] >= 0 || lo_[j] == hi_[j]) continue;
    const double a = alpha[j];
    if (std::abs(a) < kPivotTol) continue;
    const bool upper = at_upper_[j] != 0;
    const bool admissible = to_lower ? (upper ? a > 0.0 : a < 0.0)
                                     : (upper ? a < 0.0 : a > 0.0);
    if (!admissible) continue;
    const double dj = upper ? std::max(-d_[j], 0.0) : std::max(d_[j], 0.0);
    theta_max = std::min(theta_max, (dj + kDualTol) / std::abs(a));
  }
  if (theta_max == kInfinity) return -1;

  int best = -1;
  double best_alpha = 0.0;
  double best_ratio = kInfinity;
  for (std::size_t j = 0; j < n_; ++j) {
    if (where_[j] >= 0 || lo_[j] == hi_[j]) continue;
    const double a = alpha[j];
    if (std::abs(a) < kPivotTol) continue;
    const bool upper = at_upper_[j] != 0;
    const bool admissible = to_lower ? (upper ? a > 0.0 : a < 0.0)
                                     : (upper ? a < 0.0 : a > 0.0);
    if (!admissible) continue;
    const double dj = upper ? std::max(-d_[j], 0.0) : std::max(d_[j], 0.0);
    const double ratio = dj / std::abs(a);
    if (ratio > theta_max) continue;
    if (bland) {
      if (ratio < best_ratio - kDualTol) {
        best_ratio = ratio;
        best = static_cast<int>(j);
      }
    } else if (std::abs(a) > best_alpha) {
      best_alpha = std::abs(a);
      best = static_cast<int>(j);
    }
  }
  return best;
}

void DenseDualSimplex::pivot(int r_in, int q_in, double target) {
  const auto& k = simd::kernels();
  const std::size_t r = static_cast<std::size_t>(r_in);
  const std::size_t q = static_cast<std::size_t>(q_in);
  const int leave = basis_[r];
  double* pivot_row = row(r);
  const double alpha = pivot_row[q];
  const double theta = (beta_[r] - target) / alpha;

  for (std::size_t i = 0; i < m_; ++i) column_[i] = row(i)[q];
  for (std::size_t i = 0; i < m_; ++i) {
    if (i != r) beta_[i] -= column_[i] * theta;
  }
  beta_[r] = val_[q] + theta;

  val_[leave] = target;
  at_upper_[leave] = (target == hi_[leave] && lo_[leave] != hi_[leave]) ? 1 : 0;

  k.divide(pivot_row, alpha, n_);
  pivot_row[q] = 1.0;
  const double dq = d_[q];
  if (dq != 0.0) k.subtract_scaled(d_.data(), pivot_row, dq, n_);
  d_[q] = 0.0;
  for (std::size_t i = 0; i < m_; ++i) {
    if (i == r) continue;
    const double f = column_[i];
    if (f == 0.0) continue;
    double* target_row = row(i);
    k.subtract_scaled(target_row, pivot_row, f, n_);
    target_row[q] = 0.0;
  }

  basis_[r] = static_cast<int>(q);
  where_[q] = static_cast<int>(r);
  where_[leave] = -1;
}

bool DenseDualSimplex::refactor() {
  since_refactor_ = 0;
  if (m_ == 0) return true;
  const auto m = static_cast<Eigen::Index>(m_);
  const auto ns = static_cast<Eigen::Index>(ns_);
  Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const int col = basis_[static_cast<std::size_t>(r)];
    if (col < static_cast<int>(ns_)) {
      basis_matrix.col(r) = form_->a.col(col);
    } else {
      basis_matrix(col - ns, r) = 1.0;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
  if (!(lu.rcond() > 1e-14)) return false;
  const Eigen::MatrixXd inverse = lu.inverse();
  const Eigen::MatrixXd structural = inverse * form_->a;

  for (std::size_t r = 0; r < m_; ++r) {
    double* t = row(r);
    const auto ri = static_cast<Eigen::Index>(r);
    for (std::size_t j = 0; j < ns_; ++j) t[j] = structural(ri, static_cast<Eigen::Index>(j));
    for (std::size_t s = 0; s < m_; ++s) t[ns_ + s] = inverse(ri, static_cast<Eigen::Index>(s));
  }

  Eigen::VectorXd rhs = form_->rhs;
  for (std::size_t j = 0; j < n_; ++j) {
    if (where_[j] >= 0 || val_[j] == 0.0) continue;
    if (j < ns_) {
      rhs -= form_->a.col(static_cast<Eigen::Index>(j)) * val_[j];
    } else {
      rhs(static_cast<Eigen::Index>(j - ns_)) -= val_[j];
    }
  }
  const Eigen::VectorXd basic = inverse * rhs;
  for (std::size_t r = 0; r < m_; ++r) beta_[r] = basic(static_cast<Eigen::Index>(r));

  Eigen::VectorXd cb(m);
  for (Eigen::Index r = 0; r < m; ++r) cb(r) = form_->cost[basis_[static_cast<std::size_t>(r)]];
  const Eigen::VectorXd y = inverse.transpose() * cb;
  const Eigen::VectorXd dual_structural = form_->a.transpose() * y;
  for (std::size_t j = 0; j < ns_; ++j) {
    d_[j] = form_->cost[j] - dual_structural(static_cast<Eigen::Index>(j));
  }
  for (std::size_t s = 0; s < m_; ++s) d_[ns_ + s] = -y(static_cast<Eigen::Index>(s));
  for (std::size_t r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
  restore_dual_feasibility();
  return true;
}

void DenseDualSimplex::restore_dual_feasibility() {
  for (std::size_t j = 0; j < n_; ++j) {
    if (where_[j] >= 0 || lo_[j] == hi_[j]) continue;
    const bool upper = at_upper_[j] != 0;
    double next;
    if (!upper && d_[j] < -kDualTol) {
      next = hi_[j];
    } else if (upper && d_[j] > kDualTol) {
      next = lo_[j];
    } else {
      continue;
    }
    const double delta = next - val_[j];
    val_[j] = next;
    at_upper_[j] = upper ? 0 : 1;
    for (std::size_t r = 0; r < m_; ++r) beta_[r] -= row(r)[j] * delta;
  }
}

double DenseDualSimplex::max_scaled_violation() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(ns_));
  double worst = 0.0;
  for (std::size_t j = 0; j < ns_; ++j) {
    const double v = value(j);
    x(static_cast<Eigen::Index>(j)) = v;
    worst = std::max({worst, lo_[j] - v, v - hi_[j]});
  }
  if (m_ == 0) return worst;
  const Eigen::VectorXd activity = form_->a * x;
  for (std::size_t r = 0; r < m_; ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const double gap = activity(ri) - form_->rhs(ri);
    switch (form_->relation[r]) {
      case Relation::kLessEqual:
        worst = std::max(worst, gap);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, -gap);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(gap));
        break;
    }
  }
  return worst;
}

DenseDualSimplex::Outcome DenseDualSimplex::solve(const Deadline& deadline) {
  const std::int64_t limit =
      std::max<std::int64_t>(20000, 50 * static_cast<std::int64_t>(n_ + m_));
  const std::int64_t start = iterations_;
  int verify_attempts = 0;
  int degenerate = 0;
  bool bland = false;
  double last = dual_objective();

  for (;;) {
    if ((iterations_ & 31) == 0 && deadline.expired()) return Outcome::kTimeLimit;
    if (iterations_ - start > limit) return Outcome::kIterationLimit;
    if (since_refactor_ >= 500 && !refactor()) return Outcome::kNumerical;

    const int r = choose_leaving_row(bland);
    if (r < 0) {
      if (max_scaled_violation() <= 10.0 * ptol_) {
        for (std::size_t j = 0; j < n_; ++j) {
          if (where_[j] >= 0) continue;
          if (std::abs(val_[j]) >= kArtificialBound && std::abs(d_[j]) > kDualTol) {
            return Outcome::kUnbounded;
          }
        }
        return Outcome::kOptimal;
      }
      if (++verify_attempts > 3 || !refactor()) return Outcome::kNumerical;
      continue;
    }

    const int col = basis_[static_cast<std::size_t>(r)];
    const bool to_lower = beta_[static_cast<std::size_t>(r)] < lo_[col];
    const double target = to_lower ? lo_[col] : hi_[col];
    const int q = choose_entering(r, to_lower, bland);
    if (q < 0) {
      if (since_refactor_ > 0) {
        if (!refactor()) return Outcome::kNumerical;
        continue;
      }
      return Outcome::kInfeasible;
    }
    pivot(r, q, target);
    ++iterations_;
    ++since_refactor_;

    const double now = dual_objective();
    if (now > last + 1e-12 * (1.0 + std::abs(now))) {
      degenerate = 0;
      bland = false;
    } else if (++degenerate > 50) {
      bland = true;
    }
    last = now;
  }
}

}  // namespace mrea::lp::detail
