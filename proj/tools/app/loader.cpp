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

#include "app/loader.hpp"

#include <chrono>

#include "mrea/errors.hpp"

namespace mrea::app {

namespace {

PriceSeries restrict(const PriceSeries& s, const DateRange& range) {
  if (s.size() == 0) throw DataGap("market '" + s.market_id + "' has no rows");
  const Timestamp first = range.from.value_or(s.timestamps.front());
  const Timestamp end = range.to.value_or(s.timestamps.back() + s.spacing());
  if (end <= first) throw ConfigError("empty date range");
  const auto begin = s.index_of(first);
  if (!begin) {
    throw DataGap("market '" + s.market_id + "' has no price at " + format_iso8601(first));
  }
  const auto last = s.index_of(end - s.spacing());
  if (!last) {
    throw DataGap("market '" + s.market_id + "' has no price at " +
                  format_iso8601(end - s.spacing()));
  }
  return s.slice(*begin, *last - *begin + 1);
}

PriceSeries load_market(const RunConfig& config, const MarketSource& src,
                        const DateRange& range) {
  const LoadOptions options{src.id, src.currency_factor, config.forward_fill};
  PriceSeries s = load_prices(config.resolve(src.file), src.columns, options);
  try {
    s.validate();
  } catch (const GapError& e) {
    throw DataGap(src.file + ": " + e.what());
  }
  return restrict(s, range);
}

}  // namespace

std::string_view to_string(FlowScenario flow) {
  switch (flow) {
    case FlowScenario::kNone: return "none";
    case FlowScenario::kRecorded: return "recorded";
    case FlowScenario::kReversed: return "reversed";
  }
  return "none";
}

FlowScenario parse_flow(std::string_view text) {
  if (text == "none") return FlowScenario::kNone;
  if (text == "file" || text == "recorded") return FlowScenario::kRecorded;
  if (text == "reversed") return FlowScenario::kReversed;
  throw ConfigError("unknown flow scenario '" + std::string(text) +
                    "' (expected none, file or reversed)");
}

DateRange day_range(const std::string& first, const std::string& last) {
  DateRange r;
  try {
    if (!first.empty()) r.from = parse_iso8601(first);
    if (!last.empty()) r.to = parse_iso8601(last) + std::chrono::days{1};
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (r.from && r.to && *r.to <= *r.from) throw ConfigError("--to is before --from");
  return r;
}

BacktestData load_data(const RunConfig& config, const DateRange& range, FlowScenario flow) {
  BacktestData data;
  data.params = config.battery;
  data.params.eta_pseudo = config.model.eta_pseudo;
  data.home = load_market(config, config.home, range);
  if (!config.remote) return data;

  RemoteMarket remote;
  remote.prices = load_market(config, *config.remote, range);
  if (remote.prices.timestamps != data.home.timestamps) {
    throw DataGap("markets '" + data.home.market_id + "' and '" + remote.prices.market_id +
                  "' do not cover the same intervals");
  }
  const auto& ic = config.interconnector;
  remote.interconnector.l_max = ic.l_max;
  remote.interconnector.eta_line = ic.eta_line;
  if (!ic.rent_file.empty()) {
    remote.interconnector.rent =
        align(load_series(config.resolve(ic.rent_file), ic.rent_column, config.forward_fill),
              data.home);
  } else if (ic.rent > 0.0) {
    remote.interconnector.rent.assign(data.home.size(), ic.rent);
  }
  if (flow != FlowScenario::kNone) {
    if (ic.flow_file.empty()) {
      throw ConfigError("flow scenario '" + std::string(to_string(flow)) +
                        "' needs [interconnector] flow_file");
    }
    auto values = align(load_series(config.resolve(ic.flow_file), ic.flow_column,
                                    config.forward_fill),
                        data.home);
    if (flow == FlowScenario::kReversed) {
      for (double& v : values) v = -v;
    }
    remote.interconnector.flow = std::move(values);
  }
  data.remotes.push_back(std::move(remote));
  return data;
}

}  // namespace mrea::app
