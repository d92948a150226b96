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

#include "mrea/battery.hpp"
#include "mrea/errors.hpp"

using namespace mrea;
using doctest::Approx;

TEST_CASE("battery: composed efficiencies") {
  BatteryParams p;
  auto e = compose_efficiencies(p);
  CHECK(e.charge == Approx(0.9025));
  CHECK(e.discharge == Approx(0.9025));

  p.eta_ch = p.eta_dis = p.eta_conv = 1.0;
  e = compose_efficiencies(p);
  CHECK(e.charge == 1.0);
  CHECK(e.discharge == 1.0);

  BatteryParams q;
  q.eta_pseudo = 0.7;
  e = compose_efficiencies(q);
  CHECK(e.charge == Approx(0.631750));
  CHECK(e.discharge == Approx(0.631750));
  CHECK(physical_efficiencies(q).charge == Approx(0.9025));
}

TEST_CASE("battery: halving eta_pseudo halves both efficiencies") {
  BatteryParams p;
  p.eta_pseudo = 0.8;
  const auto a = compose_efficiencies(p);
  p.eta_pseudo = 0.4;
  const auto b = compose_efficiencies(p);
  CHECK(b.charge == Approx(a.charge / 2));
  CHECK(b.discharge == Approx(a.discharge / 2));
}

TEST_CASE("battery: SOC propagation") {
  BatteryParams p;
  const std::vector<double> x{0.5, -0.5};
  const auto soc = soc_propagate(p, x);
  REQUIRE(soc.levels.size() == 3);
  CHECK(soc.levels[0] == 0.5);
  CHECK(soc.levels[1] == 1.0);
  CHECK(soc.levels[2] == 0.5);

  const std::vector<double> over{0.6};
  CHECK_THROWS_AS(soc_propagate(p, over), InfeasibleSoc);
  try {
    soc_propagate(p, over);
  } catch (const InfeasibleSoc& e) {
    CHECK(e.interval() == 1);
  }

  p.b0 = 0.1;
  const auto empty = soc_propagate(p, std::vector<double>{});
  REQUIRE(empty.levels.size() == 1);
  CHECK(empty.levels[0] == 0.1);
  CHECK(empty.intervals() == 0);
}

TEST_CASE("battery: SOC tolerance absorbs round-off only") {
  BatteryParams p;
  CHECK_NOTHROW(soc_propagate(p, std::vector<double>{0.5 + 1e-10}));
  CHECK_THROWS_AS(soc_propagate(p, std::vector<double>{0.5 + 1e-8}), InfeasibleSoc);
}

TEST_CASE("battery: SOC propagation is linear") {
  BatteryParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(8), y(8), s(8);
    for (int i = 0; i < 8; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
      s[i] = x[i] + y[i];
    }
    double sx = 0, sy = 0;
    for (int i = 0; i < 8; ++i) {
      sx += x[i];
      sy += y[i];
    }
    CHECK(soc_propagate(p, s).final() == Approx(p.b0 + sx + sy).epsilon(1e-12));
  }
}

TEST_CASE("battery: grid power") {
  BatteryParams p;
  CHECK(grid_power(p, 0.0) == 0.0);
  CHECK(grid_power(p, -0.5) == Approx(-0.45125));
  BatteryParams lossless;
  lossless.eta_ch = lossless.eta_dis = lossless.eta_conv = 1.0;
  CHECK(grid_power(lossless, 0.5) == Approx(0.5));
  for (double x = -0.5; x <= 0.5; x += 0.01) CHECK(grid_power(lossless, x) == x);
  CHECK_THROWS_AS(grid_power(p, 0.7), RampViolation);
  CHECK_THROWS_AS(grid_power(p, -0.51), RampViolation);
}

TEST_CASE("battery: grid power is monotone through the origin") {
  BatteryParams p;
  double previous = grid_power(p, -0.5);
  for (int k = -49; k <= 50; ++k) {
    const double now = grid_power(p, k * 0.01);
    CHECK(now >= previous);
    previous = now;
  }
}

TEST_CASE("battery: parameter validation") {
  BatteryParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = [](auto mutate) {
    BatteryParams q;
    mutate(q);
    CHECK_THROWS_AS(q.validate(), InvalidArgument);
  };
  bad([](BatteryParams& q) { q.b_min = 1.0; });
  bad([](BatteryParams& q) { q.b0 = 1.5; });
  bad([](BatteryParams& q) { q.delta_min = 0.1; });
  bad([](BatteryParams& q) { q.h = 0.0; });
  bad([](BatteryParams& q) { q.eta_ch = 0.0; });
  bad([](BatteryParams& q) { q.eta_pseudo = 1.2; });
  CHECK(ramp_bounds(p) == RampBounds{-0.5, 0.5});
}
