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

#ifndef MREA_MULTI_REGION_HPP_
#define MREA_MULTI_REGION_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "mrea/battery.hpp"
#include "mrea/lp/linear_program.hpp"
#include "mrea/lp/solver.hpp"
#include "mrea/market_data.hpp"
#include "mrea/metrics.hpp"

namespace mrea {

struct RemoteMarket {
  PriceSeries prices;
  InterconnectorSpec interconnector;
};

// One battery sitting in the home market with access to one or more remote
// markets through interconnectors.
struct MreaInstance {
  BatteryParams params;
  PriceSeries home;
  std::vector<RemoteMarket> remotes;
  std::size_t horizon = 0;  // 0 uses the whole home series

  std::size_t intervals() const { return horizon == 0 ? home.size() : horizon; }
  std::size_t markets() const { return 1 + remotes.size(); }
  void validate() const;
};

// Prices as seen from the battery, market 0 is home, then the remotes with
// rent and line losses applied. Each vector has intervals() entries.
struct MarketPrices {
  std::vector<double> buy;
  std::vector<double> sell;
};

std::vector<MarketPrices> market_prices(const MreaInstance& inst);

// Per-market, per-interval bounds on x. Home keeps the ramp limits; remote
// bounds follow the flow envelope when requested.
std::vector<std::vector<RampBounds>> market_bounds(const MreaInstance& inst,
                                                   bool use_flow_envelopes);

// Decision block shared by the deterministic and scenario models: x per
// market and interval, one mode binary per interval, aggregate ramp,
// prefix-sum capacity and the disjunctive sign rows.
//
// z_ch = 1 puts every market in the nonpositive (discharging) orthant,
// z_ch = 0 in the nonnegative one; z_dis = 1 - z_ch is not materialized.
struct DispatchBlock {
  std::vector<std::vector<lp::VarId>> x;  // [market][interval]
  std::vector<lp::VarId> z_ch;
};

DispatchBlock add_dispatch_block(lp::LinearProgram& lp, const BatteryParams& params,
                                 const std::vector<std::vector<RampBounds>>& bounds,
                                 const std::string& prefix = "");

// Epigraph variables t[market][interval] with both cost segments, weighted
// by `weight` in the objective.
std::vector<std::vector<lp::VarId>> add_epigraph_block(lp::LinearProgram& lp,
                                                       const BatteryParams& params,
                                                       const DispatchBlock& block,
                                                       const std::vector<MarketPrices>& prices,
                                                       double weight,
                                                       const std::string& prefix = "");

struct MreaModel {
  lp::LinearProgram lp;
  DispatchBlock block;
  std::vector<std::vector<lp::VarId>> t;
  std::vector<MarketPrices> prices;
  std::vector<std::vector<RampBounds>> bounds;
  std::vector<std::string> warnings;
};

MreaModel build_mrea(const MreaInstance& inst, bool use_flow_envelopes);

struct MreaSolution {
  std::vector<double> x_home;
  std::vector<std::vector<double>> x_remote;  // [remote][interval]
  std::vector<int> z_ch;
  std::vector<int> z_dis;
  std::vector<double> t_home;
  std::vector<std::vector<double>> t_remote;
  SocTrajectory soc;
  std::vector<double> market_revenue;  // home first
  double objective = 0.0;
  double revenue_true = 0.0;
  double m_ind = 0.0;
  double opposite_conflict = 0.0;
  lp::SolveStatus status = lp::SolveStatus::kOptimal;
  double wall_time = 0.0;

  // Net energy change per interval across markets.
  std::vector<double> total() const;
};

struct MreaOptions {
  lp::SolveOptions solver;
  bool use_flow_envelopes = true;
};

// Throws SolverFailure when no optimum is found.
MreaSolution solve_mrea(const MreaInstance& inst, const MreaOptions& options = {});

// Recovers a solution from solver values of a model built over `prices`.
MreaSolution extract_solution(const BatteryParams& params, const DispatchBlock& block,
                              const std::vector<std::vector<lp::VarId>>& t,
                              const std::vector<MarketPrices>& prices,
                              const lp::SolveResult& result);

// Largest product of home and remote dispatch over intervals and remotes.
double conflict_metric(const MreaSolution& sol);
double conflict_metric(const std::vector<double>& home,
                       const std::vector<std::vector<double>>& remotes);

// Largest |x_a * x_b| over intervals and market pairs trading in opposite
// directions; zero when the shared mode holds.
double opposite_direction_conflict(const MreaSolution& sol);

// Copy of `inst` whose solver-side efficiencies include eta_pseudo.
MreaInstance apply_pseudo_efficiency(const MreaInstance& inst, double eta_pseudo);

PerformanceIndices indices(const MreaSolution& sol, const BatteryParams& params,
                           CycleMethod method = CycleMethod::kThroughput);

}  // namespace mrea

#endif  // MREA_MULTI_REGION_HPP_
