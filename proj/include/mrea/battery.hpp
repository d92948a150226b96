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

#ifndef MREA_BATTERY_HPP_
#define MREA_BATTERY_HPP_

#include <span>
#include <vector>

namespace mrea {

// Physical battery description. Defaults reproduce the 1 MWh / 0.5 MW
// reference unit used throughout the case studies (0.5C-0.5C, 0.95 round
// trip components, 0.5 MWh initial charge).
//
// Energies are in MWh, powers in MW, the sampling period in hours.
// `eta_pseudo` is a solver-side knob that filters low-margin cycles; it never
// enters revenue accounting.
struct BatteryParams {
  double b_min = 0.1;
  double b_max = 1.0;
  double b0 = 0.5;
  double delta_min = -0.5;
  double delta_max = 0.5;
  double h = 1.0;
  double eta_ch = 0.95;
  double eta_dis = 0.95;
  double eta_conv = 0.95;
  double eta_pseudo = 1.0;
  double cycle_life = 7200.0;
  double calendar_life = 10.0;
  double capital_cost = 100.0;  // currency per kWh

  // Throws InvalidArgument naming the first violated invariant.
  void validate() const;

  // Relative SOC tolerance used by every feasibility check.
  double soc_tolerance() const { return 1e-9 * b_max; }

  friend bool operator==(const BatteryParams&, const BatteryParams&) = default;
};

// Per-interval energy limits, x = delta * h.
struct RampBounds {
  double x_min = 0.0;
  double x_max = 0.0;

  friend bool operator==(const RampBounds&, const RampBounds&) = default;
};

RampBounds ramp_bounds(const BatteryParams& params);

struct Efficiencies {
  double charge = 1.0;
  double discharge = 1.0;
};

// Charging and discharging efficiencies seen by the optimizer:
// battery * converter * pseudo.
Efficiencies compose_efficiencies(const BatteryParams& params);

// Same composition with eta_pseudo forced to 1. Used for revenue accounting.
Efficiencies physical_efficiencies(const BatteryParams& params);

struct SocTrajectory {
  // levels[0] is the initial charge; levels[i] follows interval i.
  std::vector<double> levels;

  std::size_t intervals() const { return levels.empty() ? 0 : levels.size() - 1; }
  double initial() const { return levels.front(); }
  double final() const { return levels.back(); }
};

// Cumulative charge b_i = b0 + sum_{j<=i} x_j. Throws InfeasibleSoc when a
// level leaves [b_min, b_max] by more than the SOC tolerance.
SocTrajectory soc_propagate(const BatteryParams& params,
                            std::span<const double> x);

// Same recursion from an explicit starting level, without bound checks.
SocTrajectory soc_levels(double start, std::span<const double> x);

// Grid-side power drawn by the battery for an energy change x (MW). Positive
// while charging. Throws RampViolation outside the ramp bounds.
double grid_power(const BatteryParams& params, double x);

}  // namespace mrea

#endif  // MREA_BATTERY_HPP_
