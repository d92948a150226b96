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

#ifndef MREA_SIMULATION_HPP_
#define MREA_SIMULATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrea/battery.hpp"
#include "mrea/lp/solver.hpp"
#include "mrea/market_data.hpp"
#include "mrea/metrics.hpp"
#include "mrea/multi_region.hpp"
#include "mrea/single_region.hpp"

namespace mrea {

enum class ModelKind { kLp, kMilp, kNoDis, kDp, kMrea };

std::string_view to_string(ModelKind kind);
// Accepts lp, milp, nodis, dp, mrea. Throws ConfigError otherwise.
ModelKind parse_model_kind(std::string_view text);

struct HorizonPlan {
  std::size_t horizon_length = 24;  // intervals per solve
  std::size_t step = 24;            // intervals committed per solve
  bool soc_chaining = true;

  void validate() const;

  friend bool operator==(const HorizonPlan&, const HorizonPlan&) = default;
};

// Price data for a backtest. Remote markets are used by the MREA model only
// and must share the home market's timestamps.
struct BacktestData {
  BatteryParams params;
  PriceSeries home;
  std::vector<RemoteMarket> remotes;

  void validate() const;
};

struct BacktestOptions {
  ModelKind model = ModelKind::kMrea;
  HorizonPlan plan;
  lp::SolveOptions solver;
  bool use_flow_envelopes = true;
  DpConfig dp;
  bool dp_converge = false;
  CycleMethod cycles = CycleMethod::kThroughput;
  // Keep going after a failed window with an idle battery for that window.
  bool continue_on_failure = false;
  // Worker threads for independent windows; ignored when SOC is chained.
  unsigned threads = 1;
};

struct WindowRecord {
  std::size_t index = 0;
  Timestamp start;
  std::size_t committed = 0;  // intervals taken from this window
  lp::SolveStatus status = lp::SolveStatus::kOptimal;
  bool failed = false;
  std::string error;
  double revenue = 0.0;  // true revenue of the committed intervals
  double b_start = 0.0;
  double b_end = 0.0;
  double cycles = 0.0;
  double m_ind = 0.0;
  double wall_time = 0.0;
};

struct YearReport {
  int year = 0;
  std::size_t windows = 0;
  std::size_t failures = 0;
  PerformanceIndices indices;
  std::vector<double> market_revenue;  // home first
};

struct SimulationReport {
  ModelKind model = ModelKind::kMrea;
  std::vector<std::string> market_ids;
  std::vector<Timestamp> timestamps;           // committed intervals
  std::vector<std::vector<double>> x;          // [market][interval]
  std::vector<double> soc;                     // level after each interval
  std::vector<WindowRecord> windows;
  std::vector<YearReport> years;
  PerformanceIndices total;
  std::optional<double> mean_yearly_revenue_per_cycle;
  std::vector<std::size_t> failed_windows;
};

// Throws DataGap for missing or misaligned data and SolverFailure naming the
// window index unless continue_on_failure is set.
SimulationReport run_backtest(const BacktestData& data, const BacktestOptions& options);

struct ScenarioSet {
  // Equiprobable scenarios. Battery parameters are taken from the first one
  // and must match across scenarios.
  std::vector<MreaInstance> scenarios;
  bool shared_dispatch = true;

  void validate() const;
};

struct SaaResult {
  // One entry per scenario. Under shared dispatch every entry carries the same
  // schedule, priced with its own scenario.
  std::vector<MreaSolution> scenarios;
  std::vector<double> scenario_costs;
  double objective = 0.0;
  lp::SolveStatus status = lp::SolveStatus::kOptimal;
  double wall_time = 0.0;

  const MreaSolution& solution() const { return scenarios.front(); }
};

struct SaaModel {
  lp::LinearProgram lp;
  std::vector<DispatchBlock> blocks;  // one shared block or one per scenario
  std::vector<std::vector<std::vector<lp::VarId>>> t;
  std::vector<std::vector<MarketPrices>> prices;
};

// Scenario prices are truncated to plan.horizon_length intervals. Under shared
// dispatch the flow envelopes are intersected across scenarios.
SaaModel build_saa(const ScenarioSet& set, const HorizonPlan& plan,
                   bool use_flow_envelopes = true);

SaaResult run_saa(const ScenarioSet& set, const HorizonPlan& plan,
                  const MreaOptions& options = {});

struct PerturbationSpec {
  double sigma = 0.0;  // log-scale standard deviation of the price multiplier
  std::uint64_t seed = 1;
};

// Multiplies every hourly price of every market by an independent mean-one
// lognormal factor. Run r draws from a generator seeded by (seed, r).
BacktestData perturb(const BacktestData& data, const PerturbationSpec& spec, std::size_t run);

struct Distribution {
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Distribution summarize(std::vector<double> values);

struct MonteCarloOptions {
  std::size_t runs = 1;
  PerturbationSpec noise;
  unsigned threads = 0;  // 0 uses the hardware concurrency
};

struct MonteCarloReport {
  std::vector<double> revenues;
  std::vector<double> cycles;
  std::vector<double> wall_times;
  Distribution revenue;
  Distribution runtime;
};

MonteCarloReport run_monte_carlo(const BacktestData& data, const BacktestOptions& options,
                                 const MonteCarloOptions& mc);

}  // namespace mrea

#endif  // MREA_SIMULATION_HPP_
