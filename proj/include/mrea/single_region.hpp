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

#ifndef MREA_SINGLE_REGION_HPP_
#define MREA_SINGLE_REGION_HPP_

#include <cstddef>
#include <vector>

#include "mrea/battery.hpp"
#include "mrea/lp/linear_program.hpp"
#include "mrea/lp/solver.hpp"
#include "mrea/market_data.hpp"
#include "mrea/metrics.hpp"

namespace mrea {

struct SingleRegionInstance {
  BatteryParams params;
  PriceSeries prices;
  std::size_t horizon = 0;  // 0 uses the whole series

  std::size_t intervals() const { return horizon == 0 ? prices.size() : horizon; }
  void validate() const;
};

// Grid steps in MWh; 0 selects (b_max - b_min) / 90 for both.
struct DpConfig {
  double action_step = 0.0;
  double state_step = 0.0;
};

struct Dispatch {
  std::vector<double> x;  // energy change per interval, MWh
  std::vector<int> z;     // MILP mode binaries (1 = charging); empty otherwise
  SocTrajectory soc;
  double objective_reported = 0.0;  // minimized cost as seen by the model
  double revenue_true = 0.0;        // exact piecewise revenue, physical efficiencies
  lp::SolveStatus status = lp::SolveStatus::kOptimal;
  double wall_time = 0.0;
};

enum class SingleModel { kLp, kMilp, kNoDis };

// Epigraph model over one market. Variables x_i, t_i and, for kMilp, the
// mode binaries z_i (1 = charging orthant).
struct SingleRegionModel {
  lp::LinearProgram lp;
  std::vector<lp::VarId> x;
  std::vector<lp::VarId> t;
  std::vector<lp::VarId> z;
};

SingleRegionModel build_single_region(const SingleRegionInstance& inst, SingleModel kind);

// Each throws SolverFailure when the backend does not report an optimum.
Dispatch solve_lp(const SingleRegionInstance& inst, const lp::SolveOptions& options = {});
Dispatch solve_milp(const SingleRegionInstance& inst, const lp::SolveOptions& options = {});
Dispatch solve_nodis(const SingleRegionInstance& inst, const lp::SolveOptions& options = {});

// Backward induction over a regular SOC grid with linear interpolation of
// the value function. Throws GridError for invalid or incommensurate steps.
Dispatch solve_dp(const SingleRegionInstance& inst, const DpConfig& config = {});

// Halves both DP steps, starting from `config`, until revenue changes by
// less than `tolerance` or `max_refinements` is reached.
Dispatch solve_dp_converged(const SingleRegionInstance& inst, DpConfig config = {},
                            double tolerance = 0.05, int max_refinements = 6);

PerformanceIndices indices(const Dispatch& dispatch, const BatteryParams& params,
                           CycleMethod method = CycleMethod::kThroughput);

}  // namespace mrea

#endif  // MREA_SINGLE_REGION_HPP_
