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

#include "mrea/multi_region.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <spdlog/spdlog.h>

#include "model_util.hpp"
#include "mrea/errors.hpp"

namespace mrea {

namespace {

using lp::Relation;

std::string tag(const std::string& prefix, const char* what, std::size_t a, std::size_t b) {
  return prefix + what + std::to_string(a) + "_" + std::to_string(b + 1);
}

}  // namespace

void MreaInstance::validate() const {
  params.validate();
  if (remotes.empty()) throw InvalidArgument("a multi-region instance needs a remote market");
  const std::size_t n = intervals();
  if (n == 0) throw InvalidArgument("instance has no intervals");
  auto check = [n](const PriceSeries& s) {
    if (s.buy.size() < n || s.sell.size() < n) {
      throw LengthMismatch("price series '" + s.market_id + "' shorter than horizon " +
                           std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.buy[i]) || !std::isfinite(s.sell[i])) {
        throw DataError("series '" + s.market_id + "' has a non-finite price at interval " +
                        std::to_string(i));
      }
    }
  };
  check(home);
  for (const auto& r : remotes) {
    check(r.prices);
    r.interconnector.validate();
    if ((!r.interconnector.rent.empty() && r.interconnector.rent.size() < n) ||
        (!r.interconnector.flow.empty() && r.interconnector.flow.size() < n)) {
      throw LengthMismatch("interconnector series shorter than horizon " + std::to_string(n));
    }
  }
}

std::vector<MarketPrices> market_prices(const MreaInstance& inst) {
  const std::size_t n = inst.intervals();
  std::vector<MarketPrices> out;
  out.push_back({std::vector<double>(inst.home.buy.begin(), inst.home.buy.begin() + static_cast<std::ptrdiff_t>(n)),
                 std::vector<double>(inst.home.sell.begin(), inst.home.sell.begin() + static_cast<std::ptrdiff_t>(n))});
  for (const auto& r : inst.remotes) {
    PriceSeries head;
    head.market_id = r.prices.market_id;
    head.buy.assign(r.prices.buy.begin(), r.prices.buy.begin() + static_cast<std::ptrdiff_t>(n));
    head.sell.assign(r.prices.sell.begin(), r.prices.sell.begin() + static_cast<std::ptrdiff_t>(n));
    head.timestamps.resize(n);
    InterconnectorSpec ic = r.interconnector;
    if (!ic.rent.empty()) ic.rent.resize(n);
    const EffectivePrices eff = effective_prices(head, ic);
    out.push_back({eff.buy, eff.sell});
  }
  return out;
}

std::vector<std::vector<RampBounds>> market_bounds(const MreaInstance& inst,
                                                   bool use_flow_envelopes) {
  const std::size_t n = inst.intervals();
  const RampBounds ramp = ramp_bounds(inst.params);
  std::vector<std::vector<RampBounds>> out(inst.markets(), std::vector<RampBounds>(n, ramp));
  if (!use_flow_envelopes) return out;
  for (std::size_t r = 0; r < inst.remotes.size(); ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      out[r + 1][i] = adjusted_envelope(ramp, inst.remotes[r].interconnector, i, inst.params.h);
    }
  }
  return out;
}

DispatchBlock add_dispatch_block(lp::LinearProgram& lp, const BatteryParams& p,
                                 const std::vector<std::vector<RampBounds>>& bounds,
                                 const std::string& prefix) {
  const std::size_t markets = bounds.size();
  const std::size_t n = markets == 0 ? 0 : bounds[0].size();
  const RampBounds ramp = ramp_bounds(p);
  DispatchBlock block;
  block.x.assign(markets, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < markets; ++m) {
      block.x[m].push_back(
          lp.add_variable(tag(prefix, "x", m, i), bounds[m][i].x_min, bounds[m][i].x_max));
    }
    block.z_ch.push_back(lp.add_binary(prefix + "zch_" + std::to_string(i + 1)));
  }
  std::vector<lp::Term> prefix_sum;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string k = std::to_string(i + 1);
    std::vector<lp::Term> total;
    for (std::size_t m = 0; m < markets; ++m) total.push_back({block.x[m][i], 1.0});
    lp.add_constraint(prefix + "ramp_hi_" + k, total, Relation::kLessEqual, ramp.x_max);
    lp.add_constraint(prefix + "ramp_lo_" + k, total, Relation::kGreaterEqual, ramp.x_min);
    prefix_sum.insert(prefix_sum.end(), total.begin(), total.end());
    lp.add_constraint(prefix + "soc_hi_" + k, prefix_sum, Relation::kLessEqual, p.b_max - p.b0);
    lp.add_constraint(prefix + "soc_lo_" + k, prefix_sum, Relation::kGreaterEqual, p.b_min - p.b0);
    for (std::size_t m = 0; m < markets; ++m) {
      const lp::VarId x = block.x[m][i];
      const lp::VarId z = block.z_ch[i];
      // x >= z * X_min  and  x <= (1 - z) * X_max
      lp.add_constraint(tag(prefix, "dis_lo", m, i), {{x, 1.0}, {z, -bounds[m][i].x_min}},
                        Relation::kGreaterEqual, 0.0);
      lp.add_constraint(tag(prefix, "dis_hi", m, i), {{x, 1.0}, {z, bounds[m][i].x_max}},
                        Relation::kLessEqual, bounds[m][i].x_max);
    }
  }
  return block;
}

std::vector<std::vector<lp::VarId>> add_epigraph_block(lp::LinearProgram& lp,
                                                       const BatteryParams& p,
                                                       const DispatchBlock& block,
                                                       const std::vector<MarketPrices>& prices,
                                                       double weight, const std::string& prefix) {
  const Efficiencies eff = compose_efficiencies(p);
  const RampBounds ramp = ramp_bounds(p);
  const std::size_t markets = block.x.size();
  const std::size_t n = block.z_ch.size();
  double max_price = 0.0;
  for (const auto& mp : prices) {
    for (std::size_t i = 0; i < n; ++i) {
      max_price = std::max({max_price, std::abs(mp.buy[i]), std::abs(mp.sell[i])});
    }
  }
  const double floor = detail::epigraph_floor(std::max(-ramp.x_min, ramp.x_max),
                                              std::min(eff.charge, eff.discharge), max_price);
  std::vector<std::vector<lp::VarId>> t(markets);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < markets; ++m) {
      t[m].push_back(lp.add_variable(tag(prefix, "t", m, i), floor, lp::kInfinity));
      lp.set_objective(t[m].back(), weight);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < markets; ++m) {
      const double buy = prices[m].buy[i] / eff.charge;
      const double sell = prices[m].sell[i] * eff.discharge;
      const lp::VarId x = block.x[m][i];
      const lp::VarId z = block.z_ch[i];
      // The charging segment only binds when z_ch = 0 and the discharging one
      // when z_ch = 1. The constant is zero unless the interval's cost is
      // nonconvex, in which case the plain max of both lines overprices.
      const double big_m = detail::segment_big_m(buy, sell, ramp);
      lp.add_constraint(tag(prefix, "seg_buy", m, i), {{x, buy}, {t[m][i], -1.0}, {z, -big_m}},
                        Relation::kLessEqual, 0.0);
      lp.add_constraint(tag(prefix, "seg_sell", m, i), {{x, sell}, {t[m][i], -1.0}, {z, big_m}},
                        Relation::kLessEqual, big_m);
    }
  }
  return t;
}

MreaModel build_mrea(const MreaInstance& inst, bool use_flow_envelopes) {
  inst.validate();
  MreaModel model;
  model.lp = lp::LinearProgram("mrea");
  model.prices = market_prices(inst);
  model.bounds = market_bounds(inst, use_flow_envelopes);
  for (std::size_t m = 1; m < model.bounds.size(); ++m) {
    const bool pinned = std::all_of(model.bounds[m].begin(), model.bounds[m].end(),
                                    [](const RampBounds& b) { return b.x_min == 0.0 && b.x_max == 0.0; });
    if (pinned) {
      std::string msg = "flow envelope of remote market '" + inst.remotes[m - 1].prices.market_id +
                        "' is {0} at every interval";
      spdlog::warn("{}", msg);
      model.warnings.push_back(std::move(msg));
    }
  }
  model.block = add_dispatch_block(model.lp, inst.params, model.bounds);
  model.t = add_epigraph_block(model.lp, inst.params, model.block, model.prices, 1.0);
  return model;
}

std::vector<double> MreaSolution::total() const {
  std::vector<double> out = x_home;
  for (const auto& r : x_remote) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += r[i];
  }
  return out;
}

MreaSolution extract_solution(const BatteryParams& params, const DispatchBlock& block,
                              const std::vector<std::vector<lp::VarId>>& t,
                              const std::vector<MarketPrices>& prices,
                              const lp::SolveResult& result) {
  const std::size_t markets = block.x.size();
  const std::size_t n = block.z_ch.size();
  std::vector<std::vector<double>> x(markets, std::vector<double>(n));
  std::vector<double> total(n, 0.0);
  for (std::size_t m = 0; m < markets; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      x[m][i] = detail::snap_zero(result.value(block.x[m][i]));
      total[i] += x[m][i];
    }
  }
  // Round-off repair: shrink the largest trade in the offending direction.
  const auto fix = detail::soc_corrections(params, params.b0, total);
  for (std::size_t i = 0; i < n; ++i) {
    if (fix[i] == 0.0) continue;
    std::size_t pick = 0;
    for (std::size_t m = 1; m < markets; ++m) {
      if (-fix[i] * x[m][i] > -fix[i] * x[pick][i]) pick = m;
    }
    x[pick][i] += fix[i];
    total[i] += fix[i];
  }

  MreaSolution sol;
  sol.x_home = x[0];
  sol.x_remote.assign(x.begin() + 1, x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const int z = result.value(block.z_ch[i]) > 0.5 ? 1 : 0;
    sol.z_ch.push_back(z);
    sol.z_dis.push_back(1 - z);
  }
  sol.t_home.resize(n);
  sol.t_remote.assign(markets - 1, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    sol.t_home[i] = result.value(t[0][i]);
    for (std::size_t m = 1; m < markets; ++m) sol.t_remote[m - 1][i] = result.value(t[m][i]);
  }
  sol.soc = soc_propagate(params, total);
  const Efficiencies phys = physical_efficiencies(params);
  for (std::size_t m = 0; m < markets; ++m) {
    sol.market_revenue.push_back(true_revenue(x[m], prices[m].buy, prices[m].sell, phys));
    sol.revenue_true += sol.market_revenue.back();
  }
  sol.objective = result.objective_value;
  sol.status = result.status;
  sol.m_ind = conflict_metric(sol);
  sol.opposite_conflict = opposite_direction_conflict(sol);
  return sol;
}

MreaSolution solve_mrea(const MreaInstance& inst, const MreaOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const MreaModel model = build_mrea(inst, options.use_flow_envelopes);
  const lp::SolveResult result = lp::solve(model.lp, options.solver);
  if (!result.optimal()) detail::throw_solver_failure("MREA", result.status);
  MreaSolution sol = extract_solution(inst.params, model.block, model.t, model.prices, result);
  sol.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

double conflict_metric(const std::vector<double>& home,
                       const std::vector<std::vector<double>>& remotes) {
  bool any = false;
  double worst = 0.0;
  for (const auto& r : remotes) {
    for (std::size_t i = 0; i < home.size() && i < r.size(); ++i) {
      const double product = home[i] * r[i];
      worst = any ? std::max(worst, product) : product;
      any = true;
    }
  }
  return worst;
}

double conflict_metric(const MreaSolution& sol) {
  return conflict_metric(sol.x_home, sol.x_remote);
}

double opposite_direction_conflict(const MreaSolution& sol) {
  std::vector<const std::vector<double>*> all{&sol.x_home};
  for (const auto& r : sol.x_remote) all.push_back(&r);
  double worst = 0.0;
  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      for (std::size_t i = 0; i < all[a]->size(); ++i) {
        worst = std::max(worst, -(*all[a])[i] * (*all[b])[i]);
      }
    }
  }
  return worst;
}

MreaInstance apply_pseudo_efficiency(const MreaInstance& inst, double eta_pseudo) {
  if (!(eta_pseudo > 0.0 && eta_pseudo <= 1.0)) {
    throw InvalidArgument("eta_pseudo must lie in (0, 1]");
  }
  MreaInstance out = inst;
  out.params.eta_pseudo = eta_pseudo;
  return out;
}

PerformanceIndices indices(const MreaSolution& sol, const BatteryParams& params,
                           CycleMethod method) {
  return make_indices(sol.revenue_true, count_cycles(sol.soc, params, method), sol.m_ind,
                      sol.wall_time);
}

}  // namespace mrea
