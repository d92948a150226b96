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

#ifndef MREA_MARKET_DATA_HPP_
#define MREA_MARKET_DATA_HPP_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrea/battery.hpp"

namespace mrea {

using Timestamp = std::chrono::sys_seconds;

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS]" with either 'T' or a space,
// optionally followed by 'Z' or a +HH:MM / -HH:MM offset. Offsets are
// converted to UTC. Throws InvalidArgument.
Timestamp parse_iso8601(std::string_view text);
// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_iso8601(Timestamp t);

// Day-ahead prices of one market in a common currency per MWh. Prices may be
// negative.
struct PriceSeries {
  std::string market_id;
  std::vector<Timestamp> timestamps;
  std::vector<double> buy;
  std::vector<double> sell;

  std::size_t size() const { return timestamps.size(); }
  // Spacing between consecutive stamps; one hour for series shorter than 2.
  std::chrono::seconds spacing() const;
  std::optional<std::size_t> index_of(Timestamp t) const;
  // Throws InvalidArgument when the range exceeds the series.
  PriceSeries slice(std::size_t begin, std::size_t count) const;
  // LengthMismatch for ragged columns, GapError for unordered, duplicated or
  // non-uniform stamps.
  void validate() const;

  // Test and synthetic-data helper: hourly stamps from `start`.
  static PriceSeries hourly(std::string market_id, std::vector<double> buy,
                            std::vector<double> sell = {},
                            Timestamp start = Timestamp{});
};

// Exogenous interconnector between the home market and one remote market.
// `flow` is positive when power moves from the home side to the remote side.
// Empty `rent` means zero rent; empty `flow` means no recorded flow.
struct InterconnectorSpec {
  double l_max = 1.0;  // MW
  double eta_line = 1.0;
  std::vector<double> rent;  // currency per MWh, >= 0
  std::vector<double> flow;  // MW

  double rent_at(std::size_t i) const { return rent.empty() ? 0.0 : rent.at(i); }
  double flow_at(std::size_t i) const { return flow.empty() ? 0.0 : flow.at(i); }
  void validate() const;
  InterconnectorSpec slice(std::size_t begin, std::size_t count) const;
};

struct EffectivePrices {
  std::vector<double> buy;
  std::vector<double> sell;
};

// Remote prices as seen from the battery: buy (P + rent) / eta_line, sell
// (P - rent) * eta_line. Throws LengthMismatch when rent is set with a
// different length.
EffectivePrices effective_prices(const PriceSeries& remote,
                                 const InterconnectorSpec& ic);

// Ramp bounds of the remote pseudo-agent after reserving the recorded flow.
// A negative flow (remote to home) leaves l_max + flow of headroom for
// charging from the remote side; a positive flow leaves l_max - flow for
// discharging into it. The headroom is converted to energy with h.
RampBounds adjusted_envelope(const RampBounds& bounds,
                             const InterconnectorSpec& ic, std::size_t i,
                             double h = 1.0);

struct NegativePriceStats {
  std::size_t hours = 0;
  double fraction = 0.0;
};

// Counts intervals with a negative buy price. Throws InvalidArgument on an
// empty series.
NegativePriceStats negative_price_stats(const PriceSeries& prices);

// Column names are matched case-insensitively. When `price` is present the
// file carries a single clearing price used for both sides; otherwise both
// `price_buy` and `price_sell` are required.
struct CsvSchema {
  std::string timestamp = "timestamp";
  std::string price = "price";
  std::string price_buy = "price_buy";
  std::string price_sell = "price_sell";

  friend bool operator==(const CsvSchema&, const CsvSchema&) = default;
};

struct LoadOptions {
  std::string market_id;
  double currency_factor = 1.0;
  // Fill missing hours with the previous value instead of failing.
  bool forward_fill = false;
};

struct LoadReport {
  std::size_t rows = 0;
  std::vector<Timestamp> filled;  // stamps created by forward fill
};

PriceSeries read_prices(std::istream& in, const CsvSchema& schema,
                        const LoadOptions& options, LoadReport* report = nullptr);
// Throws IoError when the file cannot be opened, ParseError and GapError as
// described on read_prices.
PriceSeries load_prices(const std::filesystem::path& path,
                        const CsvSchema& schema, const LoadOptions& options,
                        LoadReport* report = nullptr);

// Generic two-column series (flow files use `timestamp, flow_mw`).
struct TimeSeries {
  std::vector<Timestamp> timestamps;
  std::vector<double> values;

  std::size_t size() const { return timestamps.size(); }
};

TimeSeries read_series(std::istream& in, const std::string& value_column,
                       bool forward_fill = false, LoadReport* report = nullptr);
TimeSeries load_series(const std::filesystem::path& path,
                       const std::string& value_column,
                       bool forward_fill = false, LoadReport* report = nullptr);

// Values of `series` at the stamps of `prices`. Throws DataGap naming the
// first stamp without a value.
std::vector<double> align(const TimeSeries& series, const PriceSeries& prices);

}  // namespace mrea

#endif  // MREA_MARKET_DATA_HPP_
