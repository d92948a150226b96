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

#ifndef MREA_SRC_MODEL_UTIL_HPP_
#define MREA_SRC_MODEL_UTIL_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mrea/battery.hpp"
#include "mrea/errors.hpp"
#include "mrea/lp/solver.hpp"

namespace mrea::detail {

// Finite lower bound for epigraph variables.
inline double epigraph_floor(double max_abs_x, double min_eta, double max_abs_price) {
  return -(max_abs_x / min_eta) * max_abs_price - 1.0;
}

// Deactivation constant for a cost segment outside its mode. Zero when the
// interval's piecewise cost is convex (buy slope above sell slope).
inline double segment_big_m(double buy_slope, double sell_slope, const RampBounds& ramp) {
  return std::max(0.0, sell_slope - buy_slope) * std::max(-ramp.x_min, ramp.x_max);
}

// Per-interval correction that keeps start + prefix sums of `total` inside
// [b_min, b_max]; removes solver round-off only.
inline std::vector<double> soc_corrections(const BatteryParams& p, double start,
                                           std::span<const double> total) {
  std::vector<double> out(total.size(), 0.0);
  double b = start;
  for (std::size_t i = 0; i < total.size(); ++i) {
    const double next = b + total[i];
    const double clipped = std::clamp(next, p.b_min, p.b_max);
    out[i] = clipped - next;
    b = clipped;
  }
  return out;
}

// Solver values within this distance of zero are reported as exact zeros.
inline double snap_zero(double v) { return std::abs(v) < 1e-9 ? 0.0 : v; }

[[noreturn]] inline void throw_solver_failure(const std::string& what, lp::SolveStatus status) {
  throw SolverFailure(what + ": " + std::string(lp::to_string(status)),
                      std::string(lp::to_string(status)));
}

}  // namespace mrea::detail

#endif  // MREA_SRC_MODEL_UTIL_HPP_
