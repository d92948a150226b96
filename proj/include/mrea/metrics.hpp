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

#ifndef MREA_METRICS_HPP_
#define MREA_METRICS_HPP_

#include <optional>
#include <span>

#include "mrea/battery.hpp"

namespace mrea {

// Exact piecewise cost of one interval: buy * x / eta_ch while charging,
// sell * eta_dis * x while discharging (negative when selling at a positive
// price).
double interval_cost(double x, double buy, double sell, const Efficiencies& eff);

// Negated total cost of a dispatch. Pass physical_efficiencies() so that the
// pseudo efficiency never leaks into accounting.
double true_revenue(std::span<const double> x, std::span<const double> buy,
                    std::span<const double> sell, const Efficiencies& eff);

enum class CycleMethod { kThroughput, kRainflow };

// Equivalent full cycles over the usable window b_max - b_min. Throughput
// divides total |delta b| by twice the window; rainflow sums the extracted
// full and half cycle ranges.
double count_cycles(const SocTrajectory& soc, const BatteryParams& params,
                    CycleMethod method = CycleMethod::kThroughput);

struct PerformanceIndices {
  double revenue = 0.0;
  double cycles = 0.0;
  std::optional<double> revenue_per_cycle;  // empty when no cycling
  double m_ind = 0.0;
  double wall_time = 0.0;
};

PerformanceIndices make_indices(double revenue, double cycles, double m_ind = 0.0,
                                double wall_time = 0.0);

// Sums revenue, cycles and time; m_ind is the maximum.
PerformanceIndices total_indices(std::span<const PerformanceIndices> parts);

// Average of the per-period revenue per cycle, skipping periods without
// cycling. Empty when no period cycles.
std::optional<double> mean_of_ratios(std::span<const PerformanceIndices> parts);

}  // namespace mrea

#endif  // MREA_METRICS_HPP_
