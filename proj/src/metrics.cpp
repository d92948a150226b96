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

#include "mrea/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mrea/errors.hpp"

namespace mrea {

double interval_cost(double x, double buy, double sell, const Efficiencies& eff) {
  return x > 0.0 ? buy * x / eff.charge : sell * eff.discharge * x;
}

double true_revenue(std::span<const double> x, std::span<const double> buy,
                    std::span<const double> sell, const Efficiencies& eff) {
  if (buy.size() < x.size() || sell.size() < x.size()) {
    throw LengthMismatch("true_revenue: fewer prices than dispatch intervals");
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) cost += interval_cost(x[i], buy[i], sell[i], eff);
  return -cost;
}

namespace {

std::vector<double> turning_points(const std::vector<double>& levels) {
  std::vector<double> out;
  for (double v : levels) {
    if (!out.empty() && v == out.back()) continue;
    if (out.size() >= 2 && (out.back() - out[out.size() - 2]) * (v - out.back()) > 0.0) {
      out.back() = v;
    } else {
      out.push_back(v);
    }
  }
  return out;
}

// Three-point rainflow extraction; returns the sum of range * count.
double rainflow_range_sum(const std::vector<double>& points) {
  std::vector<double> stack;
  double total = 0.0;
  for (double p : points) {
    stack.push_back(p);
    while (stack.size() >= 3) {
      const std::size_t n = stack.size();
      const double x = std::abs(stack[n - 1] - stack[n - 2]);
      const double y = std::abs(stack[n - 2] - stack[n - 3]);
      if (x < y) break;
      if (n == 3) {
        total += 0.5 * y;
        stack.erase(stack.begin());
      } else {
        total += y;
        stack.erase(stack.end() - 3, stack.end() - 1);
      }
    }
  }
  for (std::size_t k = 1; k < stack.size(); ++k) total += 0.5 * std::abs(stack[k] - stack[k - 1]);
  return total;
}

}  // namespace

double count_cycles(const SocTrajectory& soc, const BatteryParams& params, CycleMethod method) {
  const double window = params.b_max - params.b_min;
  if (!(window > 0.0)) throw InvalidArgument("cycle counting needs b_max > b_min");
  if (soc.levels.size() < 2) return 0.0;
  if (method == CycleMethod::kRainflow) {
    return rainflow_range_sum(turning_points(soc.levels)) / window;
  }
  double throughput = 0.0;
  for (std::size_t i = 1; i < soc.levels.size(); ++i) {
    throughput += std::abs(soc.levels[i] - soc.levels[i - 1]);
  }
  return throughput / (2.0 * window);
}

PerformanceIndices make_indices(double revenue, double cycles, double m_ind, double wall_time) {
  PerformanceIndices out;
  out.revenue = revenue;
  out.cycles = cycles;
  out.m_ind = m_ind;
  out.wall_time = wall_time;
  if (cycles > 0.0) out.revenue_per_cycle = revenue / cycles;
  return out;
}

PerformanceIndices total_indices(std::span<const PerformanceIndices> parts) {
  double revenue = 0.0, cycles = 0.0, m_ind = 0.0, time = 0.0;
  for (const auto& p : parts) {
    revenue += p.revenue;
    cycles += p.cycles;
    m_ind = std::max(m_ind, p.m_ind);
    time += p.wall_time;
  }
  return make_indices(revenue, cycles, m_ind, time);
}

std::optional<double> mean_of_ratios(std::span<const PerformanceIndices> parts) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : parts) {
    if (!p.revenue_per_cycle) continue;
    sum += *p.revenue_per_cycle;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace mrea
