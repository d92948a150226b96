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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "mrea/metrics.hpp"

using namespace mrea;
using doctest::Approx;

TEST_CASE("metrics: true revenue") {
  const Efficiencies unit{1.0, 1.0};
  const std::vector<double> zero{0, 0};
  const std::vector<double> p{10, 50};
  CHECK(true_revenue(zero, p, p, unit) == 0.0);
  const std::vector<double> x{0.5, -0.5};
  CHECK(true_revenue(x, p, p, unit) == Approx(20));

  const Efficiencies lossy{0.9, 0.8};
  CHECK(interval_cost(0.45, 10, 10, lossy) == Approx(5));
  CHECK(interval_cost(-0.5, 10, 10, lossy) == Approx(-4));
  CHECK(interval_cost(-0.5, -10, -10, lossy) == Approx(4));
}

TEST_CASE("metrics: true revenue is additive over segments") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5), price(-50, 150);
  const Efficiencies eff{0.9025, 0.9025};
  std::vector<double> x(48), buy(48), sell(48);
  for (int i = 0; i < 48; ++i) {
    x[i] = u(rng);
    buy[i] = price(rng);
    sell[i] = buy[i] - 1;
  }
  const std::span<const double> sx(x), sb(buy), ss(sell);
  CHECK(true_revenue(x, buy, sell, eff) ==
        Approx(true_revenue(sx.first(20), sb.first(20), ss.first(20), eff) +
               true_revenue(sx.subspan(20), sb.subspan(20), ss.subspan(20), eff)));
}

TEST_CASE("metrics: cycle counting") {
  BatteryParams p;
  const SocTrajectory swing{{0.1, 1.0, 0.1}};
  CHECK(count_cycles(swing, p) == Approx(1.0));
  CHECK(count_cycles(swing, p, CycleMethod::kRainflow) == Approx(1.0));
  const SocTrajectory flat{{0.5, 0.5, 0.5}};
  CHECK(count_cycles(flat, p) == 0.0);
  CHECK(count_cycles(flat, p, CycleMethod::kRainflow) == 0.0);
  const SocTrajectory single{{0.5}};
  CHECK(count_cycles(single, p) == 0.0);
}

TEST_CASE("metrics: rainflow counts a nested cycle") {
  BatteryParams p;
  // Large swing 0.1 -> 1.0 -> 0.1 with an inner 0.7 -> 0.4 -> 0.7 excursion.
  const SocTrajectory soc{{0.1, 0.7, 0.4, 1.0, 0.1}};
  CHECK(count_cycles(soc, p, CycleMethod::kRainflow) == Approx((0.9 + 0.3) / 0.9));
  CHECK(count_cycles(soc, p) == Approx((0.6 + 0.3 + 0.6 + 0.9) / 1.8));
}

TEST_CASE("metrics: cycle counts ignore reversal and offset and scale with repetition") {
  BatteryParams p;
  p.b_min = 0.0;
  p.b_max = 2.0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> levels{1.0};
    for (int i = 0; i < 30; ++i) levels.push_back(std::clamp(levels.back() + u(rng), 0.4, 1.6));
    const SocTrajectory soc{levels};
    SocTrajectory reversed{levels};
    std::reverse(reversed.levels.begin(), reversed.levels.end());
    SocTrajectory shifted{levels};
    for (double& v : shifted.levels) v += 0.3;
    SocTrajectory twice{levels};
    const double drift = levels.back() - levels.front();
    for (std::size_t i = 1; i < levels.size(); ++i) twice.levels.push_back(levels[i] + drift);
    for (auto method : {CycleMethod::kThroughput, CycleMethod::kRainflow}) {
      const double c = count_cycles(soc, p, method);
      CHECK(count_cycles(reversed, p, method) == Approx(c));
      CHECK(count_cycles(shifted, p, method) == Approx(c));
    }
    CHECK(count_cycles(twice, p) == Approx(2 * count_cycles(soc, p)));
  }
}

TEST_CASE("metrics: performance indices") {
  const auto a = make_indices(408.1, 5.0);
  REQUIRE(a.revenue_per_cycle);
  CHECK(*a.revenue_per_cycle == Approx(81.7).epsilon(0.1 / 81.7));
  const auto none = make_indices(12.5, 0.0);
  CHECK_FALSE(none.revenue_per_cycle);
  CHECK(none.revenue == 12.5);

  const auto total = make_indices(278395.8, 6281.4);
  CHECK(*total.revenue_per_cycle == Approx(44.32).epsilon(1e-3));

  const std::vector<PerformanceIndices> parts{make_indices(100, 4, 1e-12, 1.0),
                                              make_indices(50, 1, 3e-13, 2.0),
                                              make_indices(7, 0, 0, 0.5)};
  const auto sum = total_indices(parts);
  CHECK(sum.revenue == 157);
  CHECK(sum.cycles == 5);
  CHECK(sum.m_ind == 1e-12);
  CHECK(sum.wall_time == 3.5);
  CHECK(*mean_of_ratios(parts) == Approx((25.0 + 50.0) / 2));
}
