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

#include <random>
#include <vector>

#include "../support/dispatch_oracle.hpp"
#include "mrea/errors.hpp"
#include "mrea/lp/lp_format.hpp"
#include "mrea/multi_region.hpp"
#include "mrea/single_region.hpp"

using namespace mrea;
using doctest::Approx;

namespace {

BatteryParams lossless() {
  BatteryParams p;
  p.eta_ch = p.eta_dis = p.eta_conv = 1.0;
  return p;
}

MreaInstance two_markets(BatteryParams p, std::vector<double> home, std::vector<double> remote,
                         InterconnectorSpec ic = {}) {
  MreaInstance inst;
  inst.params = p;
  inst.home = PriceSeries::hourly("A", std::move(home));
  inst.remotes.push_back({PriceSeries::hourly("B", std::move(remote)), std::move(ic)});
  return inst;
}

testing::GridOracle oracle_for(const MreaInstance& inst, bool envelopes) {
  testing::GridOracle o;
  o.params = inst.params;
  o.eff = compose_efficiencies(inst.params);
  for (const auto& mp : market_prices(inst)) o.prices.push_back({mp.buy, mp.sell});
  o.bounds = market_bounds(inst, envelopes);
  return o;
}

void check_solution_invariants(const MreaSolution& s, const MreaInstance& inst) {
  const RampBounds ramp = ramp_bounds(inst.params);
  const auto total = s.total();
  for (std::size_t i = 0; i < total.size(); ++i) {
    CHECK(s.z_ch[i] + s.z_dis[i] == 1);
    CHECK(total[i] >= ramp.x_min - 1e-9);
    CHECK(total[i] <= ramp.x_max + 1e-9);
    bool nonneg = s.x_home[i] >= -1e-9, nonpos = s.x_home[i] <= 1e-9;
    for (const auto& r : s.x_remote) {
      CHECK(s.x_home[i] * r[i] >= -1e-9);
      nonneg = nonneg && r[i] >= -1e-9;
      nonpos = nonpos && r[i] <= 1e-9;
    }
    CHECK((nonneg || nonpos));
  }
  CHECK_NOTHROW(soc_propagate(inst.params, total));
  CHECK(s.opposite_conflict <= 1e-9);
}

}  // namespace

TEST_CASE("mrea: model structure for one day and two markets") {
  const auto inst = two_markets(BatteryParams{}, std::vector<double>(24, 50.0),
                                std::vector<double>(24, 60.0));
  const auto model = build_mrea(inst, false);
  const auto& lp = model.lp;
  CHECK(lp.num_integer() == 24);
  CHECK(lp.num_variables() - lp.num_integer() == 96);
  auto rows_named = [&](const std::string& stem) {
    std::size_t n = 0;
    for (const auto& c : lp.constraints()) n += c.name.rfind(stem, 0) == 0 ? 1 : 0;
    return n;
  };
  CHECK(rows_named("seg_") == 96);
  CHECK(rows_named("ramp_") == 48);
  CHECK(rows_named("soc_") == 48);
  CHECK(rows_named("dis_") == 96);
  CHECK(lp.num_constraints() == 96 + 48 + 48 + 96);
  const std::string text = lp::to_lp_string(lp);
  CHECK(lp::parse_lp_string(text).num_integer() == 24);
}

TEST_CASE("mrea: two-market spread") {
  auto p = lossless();
  p.b_min = 0.5;
  const auto inst = two_markets(p, {50, 50}, {10, 100});
  CHECK(oracle_for(inst, false).solve(2).revenue == Approx(45));
  const auto s = solve_mrea(inst);
  CHECK(s.revenue_true == Approx(45));
  CHECK(s.x_remote[0][0] == Approx(0.5));
  CHECK(s.x_remote[0][1] == Approx(-0.5));
  CHECK(s.x_home[0] == Approx(0.0));
  CHECK(s.x_home[1] == Approx(0.0));
  CHECK(s.z_ch == std::vector<int>{0, 1});
  check_solution_invariants(s, inst);

  const auto wide = two_markets(lossless(), {50, 50}, {10, 100});
  CHECK(oracle_for(wide, false).solve(2).revenue == Approx(49));
  CHECK(solve_mrea(wide).revenue_true == Approx(49));
}

TEST_CASE("mrea: identical remote market reduces to the single-market MILP") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> price(-20, 90);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> prices(3);
    for (double& v : prices) v = price(rng);
    const auto inst = two_markets(BatteryParams{}, prices, prices);
    const SingleRegionInstance single{inst.params, inst.home, 0};
    const auto s = solve_mrea(inst);
    const auto m = solve_milp(single);
    CHECK(s.objective == Approx(m.objective_reported).epsilon(1e-9));
    CHECK(s.revenue_true == Approx(oracle_for(inst, false).solve(3).revenue).epsilon(1e-9));
  }
}

TEST_CASE("mrea: saturating forward flow blocks remote discharging") {
  InterconnectorSpec ic;
  ic.l_max = 1.0;
  ic.flow = std::vector<double>(4, 1.0);
  const auto inst = two_markets(BatteryParams{}, {1, 2, 3, 4}, {5, 6, 7, 8}, ic);
  const auto bounds = market_bounds(inst, true);
  for (const auto& b : bounds[1]) {
    CHECK(b.x_min == 0.0);
    CHECK(b.x_max == 0.5);
  }
  for (const auto& b : bounds[0]) CHECK(b == ramp_bounds(inst.params));
  CHECK(build_mrea(inst, true).warnings.empty());

}

TEST_CASE("mrea: fully congested link pins the remote market and warns") {
  InterconnectorSpec ic;
  ic.l_max = 0.5;
  const auto base = two_markets(BatteryParams{}, {10, 90}, {5, 200}, ic);
  MreaInstance inst = base;
  inst.params.delta_min = 0.0;  // charging-only battery
  inst.remotes[0].interconnector.flow = {-0.5, -0.5};
  const auto model = build_mrea(inst, true);
  REQUIRE(model.warnings.size() == 1);
  const auto s = solve_mrea(inst);
  for (double x : s.x_remote[0]) CHECK(x == 0.0);
}

TEST_CASE("mrea: conflict metric") {
  MreaSolution s;
  s.x_home = {0.0, 0.0};
  s.x_remote = {{0.0, 0.0}};
  CHECK(conflict_metric(s) == 0.0);
  s.x_home = {0.2};
  s.x_remote = {{0.1}};
  CHECK(conflict_metric(s) == Approx(0.02));
  CHECK(opposite_direction_conflict(s) == 0.0);
  s.x_remote = {{-0.1}};
  CHECK(opposite_direction_conflict(s) == Approx(0.02));
}

TEST_CASE("mrea: pseudo efficiency") {
  const auto inst = two_markets(BatteryParams{}, {40, 50}, {41, 49});
  const auto same = apply_pseudo_efficiency(inst, 1.0);
  CHECK(same.params.eta_pseudo == 1.0);
  CHECK(solve_mrea(same).objective == solve_mrea(inst).objective);
  CHECK_THROWS_AS(apply_pseudo_efficiency(inst, 0.0), InvalidArgument);
  CHECK_THROWS_AS(apply_pseudo_efficiency(inst, 1.1), InvalidArgument);

  // Spread ratio 1.25 is below 1 / 0.8^2: the cycle is filtered out.
  auto p = lossless();
  p.b0 = p.b_min;
  const auto filtered = apply_pseudo_efficiency(two_markets(p, {40, 50}, {40, 50}), 0.8);
  auto o = oracle_for(filtered, false);
  CHECK(o.solve(2).revenue == Approx(0.0));
  const auto s = solve_mrea(filtered);
  CHECK(s.total() == std::vector<double>{0.0, 0.0});
  CHECK(s.revenue_true == 0.0);
  // Without the filter the same cycle pays.
  CHECK(solve_mrea(two_markets(p, {40, 50}, {40, 50})).revenue_true == Approx(5));
}

TEST_CASE("mrea: properties on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> price(-50, 100), flow(-1, 1), unit(0, 1);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + trial % 3;
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = price(rng);
    for (auto& v : b) v = price(rng);
    InterconnectorSpec ic;
    ic.l_max = 1.0;
    for (std::size_t i = 0; i < n; ++i) ic.flow.push_back(unit(rng) < 0.5 ? 0.0 : flow(rng) > 0 ? 1.0 : -1.0);
    const auto inst = two_markets(BatteryParams{}, a, b, ic);
    CAPTURE(trial);

    const auto free = solve_mrea(inst, {{}, false});
    const auto congested = solve_mrea(inst, {{}, true});
    check_solution_invariants(free, inst);
    check_solution_invariants(congested, inst);
    CHECK(free.m_ind <= 1e-9);
    CHECK(congested.m_ind <= 1e-9);

    CHECK(free.revenue_true == Approx(oracle_for(inst, false).solve(n).revenue).epsilon(1e-9));
    CHECK(congested.revenue_true ==
          Approx(oracle_for(inst, true).solve(n).revenue).epsilon(1e-9));
    CHECK(congested.revenue_true <= free.revenue_true + 1e-9);

    const auto prices = market_prices(inst);
    for (const auto& mp : prices) {
      const SingleRegionInstance single{inst.params, PriceSeries::hourly("s", mp.buy, mp.sell), 0};
      CHECK(free.revenue_true >= solve_milp(single).revenue_true - 1e-6);
    }
  }
}

TEST_CASE("mrea: three markets share one mode per interval") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> price(-30, 120);
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<double> a(4), b(4), c(4);
    for (auto& v : a) v = price(rng);
    for (auto& v : b) v = price(rng);
    for (auto& v : c) v = price(rng);
    auto inst = two_markets(BatteryParams{}, a, b);
    InterconnectorSpec ic;
    ic.eta_line = 0.975;
    ic.rent = {1, 1, 1, 1};
    inst.remotes.push_back({PriceSeries::hourly("C", c), ic});
    const auto s = solve_mrea(inst);
    check_solution_invariants(s, inst);
    CHECK(s.x_remote.size() == 2);
    CHECK(s.revenue_true == Approx(oracle_for(inst, false).solve(4).revenue).epsilon(1e-9));
  }
}

TEST_CASE("mrea: invalid instances") {
  MreaInstance inst;
  inst.home = PriceSeries::hourly("A", {1, 2});
  CHECK_THROWS_AS(solve_mrea(inst), InvalidArgument);
  auto bad = two_markets(BatteryParams{}, {1, 2}, {1});
  CHECK_THROWS_AS(solve_mrea(bad), LengthMismatch);
}
