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

#include <sstream>

#include "mrea/errors.hpp"
#include "mrea/market_data.hpp"

using namespace mrea;
using doctest::Approx;

namespace {

PriceSeries read(const std::string& text, LoadOptions opt = {}, LoadReport* report = nullptr) {
  std::istringstream in(text);
  return read_prices(in, CsvSchema{}, opt, report);
}

}  // namespace

TEST_CASE("market data: ISO-8601 timestamps") {
  const auto t = parse_iso8601("2024-06-30T00:00:00Z");
  CHECK(format_iso8601(t) == "2024-06-30T00:00:00Z");
  CHECK(parse_iso8601("2024-06-30 00:00") == t);
  CHECK(parse_iso8601("2024-06-30") == t);
  CHECK(parse_iso8601("2024-06-30T02:00:00+02:00") == t);
  CHECK(parse_iso8601("2024-06-29T23:00-01:00") == t);
  CHECK_THROWS_AS(parse_iso8601("2024-02-30"), InvalidArgument);
  CHECK_THROWS_AS(parse_iso8601("30.06.2024 00:00"), InvalidArgument);
  CHECK_THROWS_AS(parse_iso8601("2024-06-30T00:00Zjunk"), InvalidArgument);
}

TEST_CASE("market data: currency conversion") {
  LoadOptions opt;
  opt.currency_factor = 1.15;
  const auto s = read("timestamp,price\n2024-06-30T00:00Z,100\n2024-06-30T01:00Z,-20\n", opt);
  CHECK(s.buy[0] == Approx(115));
  CHECK(s.sell[0] == Approx(115));
  CHECK(s.buy[1] == Approx(-23));
}

TEST_CASE("market data: single price column feeds both sides") {
  const auto s = read("timestamp,price\n2024-06-30T00:00Z,50\n2024-06-30T01:00Z,60\n");
  CHECK(s.buy == std::vector<double>{50, 60});
  CHECK(s.sell == std::vector<double>{50, 60});
  CHECK(s.spacing() == std::chrono::hours{1});
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("market data: separate buy and sell columns, semicolons and decimal commas") {
  const auto s = read(
      "Timestamp;Price_Sell;Price_Buy\n"
      "2024-06-30T00:00Z;\"49,5\";51,25\n"
      "2024-06-30T01:00Z;-3;-2\n");
  CHECK(s.buy == std::vector<double>{51.25, -2});
  CHECK(s.sell == std::vector<double>{49.5, -3});
}

TEST_CASE("market data: duplicated timestamp is a gap error") {
  try {
    read("timestamp,price\n2024-06-30T00:00Z,1\n2024-06-30T00:00Z,2\n");
    FAIL("expected GapError");
  } catch (const GapError& e) {
    REQUIRE(e.locations().size() == 1);
    CHECK(e.locations()[0].find("duplicated") != std::string::npos);
  }
}

TEST_CASE("market data: missing hours fail unless forward-filled") {
  const std::string text =
      "timestamp,price\n2024-06-30T00:00Z,10\n2024-06-30T01:00Z,11\n2024-06-30T04:00Z,14\n";
  try {
    read(text);
    FAIL("expected GapError");
  } catch (const GapError& e) {
    CHECK(e.locations() ==
          std::vector<std::string>{"2024-06-30T02:00:00Z", "2024-06-30T03:00:00Z"});
  }
  LoadOptions opt;
  opt.forward_fill = true;
  LoadReport report;
  const auto s = read(text, opt, &report);
  CHECK(s.buy == std::vector<double>{10, 11, 11, 11, 14});
  CHECK(report.filled.size() == 2);
  CHECK(report.rows == 3);
}

TEST_CASE("market data: malformed rows raise ParseError with the line") {
  try {
    read("timestamp,price\n2024-06-30T00:00Z,10\n2024-06-30T01:00Z,abc\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(read("timestamp,price\n2024-06-30T00:00Z\n"), ParseError);
  CHECK_THROWS_AS(read("time,value\n2024-06-30T00:00Z,1\n"), ParseError);
  CHECK_THROWS_AS(read(""), ParseError);
  CHECK_THROWS_AS(read("timestamp,price\n2024-06-30T00:00Z,1\n", LoadOptions{"", 0.0, false}),
                  InvalidArgument);
  CHECK_THROWS_AS(load_prices("/nonexistent/prices.csv", {}, {}), IoError);
}

TEST_CASE("market data: flow series and alignment") {
  std::istringstream in("timestamp,flow_mw\n2024-06-30T00:00Z,-0.5\n2024-06-30T01:00Z,0.25\n");
  const auto flow = read_series(in, "flow_mw");
  const auto prices = PriceSeries::hourly("BE", {1, 2}, {}, parse_iso8601("2024-06-30"));
  CHECK(align(flow, prices) == std::vector<double>{-0.5, 0.25});
  const auto later = PriceSeries::hourly("BE", {1, 2, 3}, {}, parse_iso8601("2024-06-30"));
  CHECK_THROWS_AS(align(flow, later), DataGap);
}

TEST_CASE("market data: effective prices") {
  InterconnectorSpec ic;
  ic.eta_line = 0.975;
  ic.rent = {1.0};
  auto e = effective_prices(PriceSeries::hourly("UK", {100}), ic);
  CHECK(e.buy[0] == Approx(103.58974358974359));

  InterconnectorSpec identity;
  const auto s = PriceSeries::hourly("UK", {-5, 10, 250}, {-6, 9, 240});
  e = effective_prices(s, identity);
  CHECK(e.buy == s.buy);
  CHECK(e.sell == s.sell);

  InterconnectorSpec rent;
  rent.rent = {12.0};
  e = effective_prices(PriceSeries::hourly("UK", {10}), rent);
  CHECK(e.sell[0] == Approx(-2));

  InterconnectorSpec ragged;
  ragged.rent = {1, 2};
  CHECK_THROWS_AS(effective_prices(PriceSeries::hourly("UK", {10}), ragged), LengthMismatch);
}

TEST_CASE("market data: effective prices widen the spread for nonnegative prices") {
  InterconnectorSpec ic;
  ic.eta_line = 0.9;
  ic.rent = {0, 1, 2, 3, 4};
  const auto s = PriceSeries::hourly("UK", {0, 5, 50, 100, 1000});
  const auto e = effective_prices(s, ic);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(e.buy[i] >= s.buy[i]);
    CHECK(e.sell[i] <= s.sell[i]);
  }
}

TEST_CASE("market data: adjusted envelope") {
  const RampBounds ramp{-0.5, 0.5};
  InterconnectorSpec ic;
  ic.l_max = 1.0;
  ic.flow = {-0.7, 0.0, 0.8, 1.0, -1.0};
  CHECK(adjusted_envelope(ramp, ic, 0).x_max == Approx(0.3));
  CHECK(adjusted_envelope(ramp, ic, 0).x_min == -0.5);
  CHECK(adjusted_envelope(ramp, ic, 1) == ramp);
  CHECK(adjusted_envelope(ramp, ic, 2).x_min == Approx(-0.2));
  CHECK(adjusted_envelope(ramp, ic, 2).x_max == 0.5);
  CHECK(adjusted_envelope(ramp, ic, 3) == RampBounds{0.0, 0.5});
  CHECK(adjusted_envelope(ramp, ic, 4) == RampBounds{-0.5, 0.0});
}

TEST_CASE("market data: adjusted envelope stays inside ramp and headroom") {
  const RampBounds ramp{-0.5, 0.5};
  InterconnectorSpec ic;
  ic.l_max = 0.6;
  for (int k = -60; k <= 60; ++k) {
    ic.flow = {k * 0.01};
    const auto b = adjusted_envelope(ramp, ic, 0);
    CHECK(b.x_min <= 0.0);
    CHECK(b.x_max >= 0.0);
    CHECK(b.x_min >= ramp.x_min);
    CHECK(b.x_max <= ramp.x_max);
    CHECK(b.x_max <= std::max(0.0, ic.l_max + std::min(0.0, ic.flow[0])) + 1e-12);
    CHECK(b.x_min >= std::min(0.0, -ic.l_max + std::max(0.0, ic.flow[0])) - 1e-12);
  }
}

TEST_CASE("market data: negative price statistics") {
  auto stats = negative_price_stats(PriceSeries::hourly("BE", {-5, 10, -1}));
  CHECK(stats.hours == 2);
  CHECK(stats.fraction == Approx(0.667).epsilon(1e-3));
  stats = negative_price_stats(PriceSeries::hourly("BE", {1, 2, 3}));
  CHECK(stats.hours == 0);
  CHECK(stats.fraction == 0.0);
  stats = negative_price_stats(PriceSeries::hourly("BE", std::vector<double>(24, -1.0)));
  CHECK(stats.hours == 24);
  CHECK(stats.fraction == 1.0);
  CHECK_THROWS_AS(negative_price_stats(PriceSeries{}), InvalidArgument);
}

TEST_CASE("market data: interconnector validation") {
  InterconnectorSpec ic;
  CHECK_NOTHROW(ic.validate());
  ic.flow = {1.5};
  CHECK_THROWS_AS(ic.validate(), InvalidArgument);
  ic.flow.clear();
  ic.rent = {-1};
  CHECK_THROWS_AS(ic.validate(), InvalidArgument);
  ic.rent.clear();
  ic.eta_line = 0.0;
  CHECK_THROWS_AS(ic.validate(), InvalidArgument);
}

TEST_CASE("market data: slicing") {
  const auto s = PriceSeries::hourly("BE", {1, 2, 3, 4});
  const auto t = s.slice(1, 2);
  CHECK(t.buy == std::vector<double>{2, 3});
  CHECK(t.timestamps[0] == s.timestamps[1]);
  CHECK(s.index_of(s.timestamps[3]) == 3u);
  CHECK_THROWS_AS(s.slice(3, 2), InvalidArgument);
}
