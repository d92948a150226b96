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

#include "mrea/single_region.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "model_util.hpp"
#include "mrea/errors.hpp"
#include "mrea/simd/kernels.hpp"

namespace mrea {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Dispatch finish(const SingleRegionInstance& inst, std::vector<double> x) {
  const BatteryParams& p = inst.params;
  const auto fix = detail::soc_corrections(p, p.b0, x);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += fix[i];
  Dispatch d;
  d.soc = soc_propagate(p, x);
  d.revenue_true = true_revenue(x, inst.prices.buy, inst.prices.sell, physical_efficiencies(p));
  d.x = std::move(x);
  return d;
}

Dispatch solve_epigraph(const SingleRegionInstance& inst, SingleModel kind,
                        const lp::SolveOptions& options, const char* label) {
  const auto start = Clock::now();
  const SingleRegionModel model = build_single_region(inst, kind);
  const lp::SolveResult result = lp::solve(model.lp, options);
  if (!result.optimal()) detail::throw_solver_failure(label, result.status);
  std::vector<double> x;
  x.reserve(model.x.size());
  for (lp::VarId id : model.x) x.push_back(detail::snap_zero(result.value(id)));
  Dispatch d = finish(inst, std::move(x));
  for (lp::VarId id : model.z) d.z.push_back(result.value(id) > 0.5 ? 1 : 0);
  d.objective_reported = result.objective_value;
  d.status = result.status;
  d.wall_time = seconds_since(start);
  return d;
}

// Regular grid lo + k * step, with hi appended when it is not a grid point.
std::vector<double> state_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const double span = (hi - lo) / step;
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  if (hi - out.back() > 1e-9 * step) {
    out.push_back(hi);
  } else {
    out.back() = hi;
  }
  return out;
}

// Integer multiples of step inside [lo, hi], plus both ends.
std::vector<double> action_grid(double lo, double hi, double step) {
  std::vector<double> out;
  const auto k0 = static_cast<long>(std::ceil(lo / step - 1e-9));
  const auto k1 = static_cast<long>(std::floor(hi / step + 1e-9));
  if (lo < static_cast<double>(k0) * step - 1e-9 * step) out.push_back(lo);
  for (long k = k0; k <= k1; ++k) out.push_back(std::clamp(static_cast<double>(k) * step, lo, hi));
  if (out.empty() || hi > out.back() + 1e-9 * step) out.push_back(hi);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Minimum total with ties resolved towards the smallest |x|, then charging.
std::size_t select_action(const double* total, const double* x, std::size_t n) {
  double best_total = total[0];
  for (std::size_t a = 1; a < n; ++a) best_total = std::min(best_total, total[a]);
  const double tol = 1e-9 * (1.0 + std::abs(best_total));
  std::size_t best = n;
  for (std::size_t a = 0; a < n; ++a) {
    if (total[a] > best_total + tol) continue;
    if (best == n) {
      best = a;
      continue;
    }
    const double ax = std::abs(x[a]), bx = std::abs(x[best]);
    if (ax < bx || (ax == bx && x[a] > x[best])) best = a;
  }
  return best;
}

}  // namespace

void SingleRegionInstance::validate() const {
  params.validate();
  const std::size_t n = intervals();
  if (n == 0) throw InvalidArgument("instance has no intervals");
  if (prices.buy.size() < n || prices.sell.size() < n) {
    throw LengthMismatch("price series '" + prices.market_id + "' shorter than horizon " +
                         std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(prices.buy[i]) || !std::isfinite(prices.sell[i])) {
      throw DataError("non-finite price at interval " + std::to_string(i));
    }
  }
}

SingleRegionModel build_single_region(const SingleRegionInstance& inst, SingleModel kind) {
  inst.validate();
  const BatteryParams& p = inst.params;
  const std::size_t n = inst.intervals();
  const Efficiencies eff = compose_efficiencies(p);
  const RampBounds ramp = ramp_bounds(p);
  double max_price = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    max_price = std::max({max_price, std::abs(inst.prices.buy[i]), std::abs(inst.prices.sell[i])});
  }
  const double floor = detail::epigraph_floor(std::max(-ramp.x_min, ramp.x_max),
                                              std::min(eff.charge, eff.discharge), max_price);

  SingleRegionModel m;
  const char* name = kind == SingleModel::kLp ? "lp" : kind == SingleModel::kMilp ? "milp" : "nodis";
  m.lp = lp::LinearProgram(name);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string k = std::to_string(i + 1);
    double lo = ramp.x_min;
    if (kind == SingleModel::kNoDis && !(inst.prices.buy[i] < 0.0)) lo = 0.0;
    m.x.push_back(m.lp.add_variable("x_" + k, lo, ramp.x_max));
    m.t.push_back(m.lp.add_variable("t_" + k, floor, lp::kInfinity));
    m.lp.set_objective(m.t.back(), 1.0);
    if (kind == SingleModel::kMilp) m.z.push_back(m.lp.add_binary("z_" + k));
  }
  using lp::Relation;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string k = std::to_string(i + 1);
    const double buy = inst.prices.buy[i] / eff.charge;
    const double sell = inst.prices.sell[i] * eff.discharge;
    if (kind == SingleModel::kMilp) {
      // z = 1 selects the charging orthant; each segment only binds in its
      // own mode, which keeps the epigraph exact for nonconvex intervals.
      const double big_m = detail::segment_big_m(buy, sell, ramp);
      m.lp.add_constraint("buy_" + k, {{m.x[i], buy}, {m.t[i], -1.0}, {m.z[i], big_m}},
                          Relation::kLessEqual, big_m);
      m.lp.add_constraint("sell_" + k, {{m.x[i], sell}, {m.t[i], -1.0}, {m.z[i], -big_m}},
                          Relation::kLessEqual, 0.0);
      m.lp.add_constraint("mode_lo_" + k, {{m.x[i], 1.0}, {m.z[i], ramp.x_min}},
                          Relation::kGreaterEqual, ramp.x_min);
      m.lp.add_constraint("mode_hi_" + k, {{m.x[i], 1.0}, {m.z[i], -ramp.x_max}},
                          Relation::kLessEqual, 0.0);
    } else {
      m.lp.add_constraint("buy_" + k, {{m.x[i], buy}, {m.t[i], -1.0}}, Relation::kLessEqual, 0.0);
      m.lp.add_constraint("sell_" + k, {{m.x[i], sell}, {m.t[i], -1.0}}, Relation::kLessEqual,
                          0.0);
    }
  }
  std::vector<lp::Term> prefix;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string k = std::to_string(i + 1);
    prefix.push_back({m.x[i], 1.0});
    m.lp.add_constraint("soc_hi_" + k, prefix, Relation::kLessEqual, p.b_max - p.b0);
    m.lp.add_constraint("soc_lo_" + k, prefix, Relation::kGreaterEqual, p.b_min - p.b0);
  }
  return m;
}

Dispatch solve_lp(const SingleRegionInstance& inst, const lp::SolveOptions& options) {
  return solve_epigraph(inst, SingleModel::kLp, options, "LP");
}

Dispatch solve_milp(const SingleRegionInstance& inst, const lp::SolveOptions& options) {
  return solve_epigraph(inst, SingleModel::kMilp, options, "MILP");
}

Dispatch solve_nodis(const SingleRegionInstance& inst, const lp::SolveOptions& options) {
  return solve_epigraph(inst, SingleModel::kNoDis, options, "noDis");
}

Dispatch solve_dp(const SingleRegionInstance& inst, const DpConfig& config) {
  const auto start = Clock::now();
  inst.validate();
  const BatteryParams& p = inst.params;
  const RampBounds ramp = ramp_bounds(p);
  const double window = p.b_max - p.b_min;
  if (config.state_step < 0.0 || config.action_step < 0.0 || std::isnan(config.state_step) ||
      std::isnan(config.action_step)) {
    throw GridError("grid steps must be positive");
  }
  const double d_s = config.state_step > 0.0 ? config.state_step : window / 90.0;
  const double d_a = config.action_step > 0.0 ? config.action_step : d_s;
  if (!(d_s > 0.0) || d_s > window * (1.0 + 1e-12)) {
    throw GridError("state step must lie in (0, b_max - b_min]");
  }
  const double ramp_span = ramp.x_max - ramp.x_min;
  if (!(d_a > 0.0) || (ramp_span > 0.0 && d_a > ramp_span * (1.0 + 1e-12))) {
    throw GridError("action step must lie in (0, x_max - x_min]");
  }
  const double ratio = d_a / d_s;
  if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw GridError("action step " + std::to_string(d_a) +
                    " is not a positive integer multiple of state step " + std::to_string(d_s));
  }

  const std::vector<double> grid = state_grid(p.b_min, p.b_max, d_s);
  const std::vector<double> actions = action_grid(ramp.x_min, ramp.x_max, d_a);
  const std::size_t ng = grid.size();
  const std::size_t na = actions.size();
  const std::size_t n = inst.intervals();
  const Efficiencies eff = compose_efficiencies(p);

  const double nearest = grid[static_cast<std::size_t>(
      std::clamp(std::round((p.b0 - p.b_min) / d_s), 0.0, static_cast<double>(ng - 1)))];
  if (std::abs(nearest - p.b0) > 1e-12) {
    spdlog::debug("dp: initial charge {} is {} MWh off the state grid", p.b0, p.b0 - nearest);
  }

  // values[i] is the cost-to-go before interval i; values[n] is zero.
  std::vector<std::vector<double>> values(n + 1, std::vector<double>(ng, 0.0));
  std::vector<double> total(na), clipped(na);
  const auto& k = simd::kernels();
  simd::ActionEvalArgs args;
  args.actions = actions.data();
  args.n_actions = na;
  args.grid = grid.data();
  args.n_grid = ng;
  args.grid_origin = p.b_min;
  args.inv_step = 1.0 / d_s;

  for (std::size_t i = n; i-- > 0;) {
    args.buy_slope = inst.prices.buy[i] / eff.charge;
    args.sell_slope = inst.prices.sell[i] * eff.discharge;
    args.values = values[i + 1].data();
    for (std::size_t g = 0; g < ng; ++g) {
      args.state = grid[g];
      args.lower = p.b_min - grid[g];
      args.upper = p.b_max - grid[g];
      k.evaluate_actions(args, total.data(), clipped.data());
      values[i][g] = total[select_action(total.data(), clipped.data(), na)];
    }
  }

  std::vector<double> x(n);
  double b = p.b0;
  double objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    args.buy_slope = inst.prices.buy[i] / eff.charge;
    args.sell_slope = inst.prices.sell[i] * eff.discharge;
    args.values = values[i + 1].data();
    args.state = b;
    args.lower = p.b_min - b;
    args.upper = p.b_max - b;
    k.evaluate_actions(args, total.data(), clipped.data());
    const std::size_t a = select_action(total.data(), clipped.data(), na);
    if (i == 0) objective = total[a];
    x[i] = clipped[a];
    b += x[i];
  }

  Dispatch d = finish(inst, std::move(x));
  d.objective_reported = objective;
  d.wall_time = seconds_since(start);
  return d;
}

Dispatch solve_dp_converged(const SingleRegionInstance& inst, DpConfig config, double tolerance,
                            int max_refinements) {
  const double window = inst.params.b_max - inst.params.b_min;
  if (config.state_step <= 0.0) config.state_step = window / 90.0;
  if (config.action_step <= 0.0) config.action_step = config.state_step;
  Dispatch best = solve_dp(inst, config);
  double elapsed = best.wall_time;
  for (int r = 0; r < max_refinements; ++r) {
    config.state_step /= 2.0;
    config.action_step /= 2.0;
    Dispatch next = solve_dp(inst, config);
    elapsed += next.wall_time;
    const double change = std::abs(next.revenue_true - best.revenue_true);
    best = std::move(next);
    if (change < tolerance) break;
  }
  best.wall_time = elapsed;
  return best;
}

PerformanceIndices indices(const Dispatch& dispatch, const BatteryParams& params,
                           CycleMethod method) {
  return make_indices(dispatch.revenue_true, count_cycles(dispatch.soc, params, method), 0.0,
                      dispatch.wall_time);
}

}  // namespace mrea
