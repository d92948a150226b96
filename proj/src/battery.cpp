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

#include "mrea/battery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mrea/errors.hpp"

namespace mrea {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(std::string("BatteryParams: ") + what);
}

bool unit_fraction(double v) { return v > 0.0 && v <= 1.0; }

}  // namespace

void BatteryParams::validate() const {
  require(std::isfinite(b_min) && std::isfinite(b_max) && std::isfinite(b0),
          "capacities must be finite");
  require(0.0 <= b_min && b_min < b_max, "requires 0 <= b_min < b_max");
  require(b_min <= b0 && b0 <= b_max, "requires b_min <= b0 <= b_max");
  require(delta_min <= 0.0 && delta_max >= 0.0,
          "requires delta_min <= 0 <= delta_max");
  require(std::isfinite(delta_min) && std::isfinite(delta_max),
          "ramp limits must be finite");
  require(h > 0.0 && std::isfinite(h), "sampling period h must be positive");
  require(unit_fraction(eta_ch), "eta_ch must lie in (0, 1]");
  require(unit_fraction(eta_dis), "eta_dis must lie in (0, 1]");
  require(unit_fraction(eta_conv), "eta_conv must lie in (0, 1]");
  require(unit_fraction(eta_pseudo), "eta_pseudo must lie in (0, 1]");
}

RampBounds ramp_bounds(const BatteryParams& params) {
  return {params.delta_min * params.h, params.delta_max * params.h};
}

Efficiencies compose_efficiencies(const BatteryParams& params) {
  return {params.eta_ch * params.eta_conv * params.eta_pseudo,
          params.eta_dis * params.eta_conv * params.eta_pseudo};
}

Efficiencies physical_efficiencies(const BatteryParams& params) {
  return {params.eta_ch * params.eta_conv, params.eta_dis * params.eta_conv};
}

SocTrajectory soc_levels(double start, std::span<const double> x) {
  SocTrajectory soc;
  soc.levels.reserve(x.size() + 1);
  double b = start;
  soc.levels.push_back(b);
  for (double xi : x) {
    b += xi;
    soc.levels.push_back(b);
  }
  return soc;
}

SocTrajectory soc_propagate(const BatteryParams& params,
                            std::span<const double> x) {
  SocTrajectory soc = soc_levels(params.b0, x);
  const double tol = params.soc_tolerance();
  for (std::size_t i = 1; i < soc.levels.size(); ++i) {
    const double b = soc.levels[i];
    if (b < params.b_min - tol || b > params.b_max + tol) {
      std::ostringstream msg;
      msg << "state of charge " << b << " MWh after interval " << i
          << " outside [" << params.b_min << ", " << params.b_max << "]";
      throw InfeasibleSoc(msg.str(), i);
    }
  }
  return soc;
}

double grid_power(const BatteryParams& params, double x) {
  const RampBounds ramp = ramp_bounds(params);
  const double tol = 1e-9 * std::max({1.0, -ramp.x_min, ramp.x_max});
  if (x < ramp.x_min - tol || x > ramp.x_max + tol) {
    std::ostringstream msg;
    msg << "energy change " << x << " MWh outside ramp bounds [" << ramp.x_min
        << ", " << ramp.x_max << "]";
    throw RampViolation(msg.str());
  }
  const Efficiencies eff = compose_efficiencies(params);
  return std::max(0.0, x) / (params.h * eff.charge) -
         eff.discharge * std::max(0.0, -x) / params.h;
}

}  // namespace mrea
